import json
import os
import sys
import time
from contextlib import contextmanager

from django.conf import settings
from django.core.management import CommandError, call_command

from .exceptions import FdalgError


EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNDECIDED = 2
EXIT_ERROR = 3

STATUS_EXIT_CODES = {
    'PASS': EXIT_OK,
    'OK': EXIT_OK,
    'CONFIRMED': EXIT_OK,
    'FAIL': EXIT_FAIL,
    'HYPOTHESIS_UNMET': EXIT_FAIL,
    'ANOMALY': EXIT_FAIL,
    'UNDECIDED_SAMPLED': EXIT_UNDECIDED,
    'BUDGET_EXCEEDED': EXIT_UNDECIDED,
}


def exit_code_for(status):
    return STATUS_EXIT_CODES.get(status, EXIT_FAIL)


def read_json(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as exc:
        raise FdalgError(f"Cannot read {path}: {exc.strerror}", code='FILE_NOT_FOUND')
    except json.JSONDecodeError as exc:
        raise FdalgError(f"{path} is not valid JSON: {exc}", code='MALFORMED_FILE')


def write_json(path, data):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(data, handle, indent=2)
        handle.write('\n')


@contextmanager
def stopwatch():
    """Yields a dict that receives the elapsed wall time in seconds."""
    timings = {}
    start = time.perf_counter()
    try:
        yield timings
    finally:
        timings['seconds'] = round(time.perf_counter() - start, 6)


def render_report(command, result, timings=None):
    """Serialize a report; timings are included only when FDALG_REPORT_TIMINGS is on."""
    from .serializers import ReportSerializer

    report = {'command': command, **result}
    if timings is not None and settings.FDALG_REPORT_TIMINGS:
        report['timings'] = timings
    data = ReportSerializer(report).data
    return json.dumps(data, indent=2)


def run(argv, stdout=None, stderr=None):
    """
    Run one ``fdalg`` subcommand and return its exit code.

    0 PASS/OK, 1 FAIL, 2 undecided or over budget, 3 usage or internal error.
    """
    from .management.commands.fdalg import Command

    stderr = stderr or sys.stderr
    command = Command(stdout=stdout, stderr=stderr)
    try:
        call_command(command, *argv, stdout=stdout, stderr=stderr)
    except (CommandError, FdalgError) as exc:
        stderr.write(f"fdalg: {exc}\n")
        return EXIT_ERROR
    return command.exit_code


def main(argv=None):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Fdalg_Platform.settings')
    import django

    django.setup()
    return run(sys.argv[1:] if argv is None else argv)
