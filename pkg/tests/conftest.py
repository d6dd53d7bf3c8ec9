from io import StringIO

import pytest
from django.core.management import call_command


@pytest.fixture
def run_command():
    """Run a management command and return what it printed."""

    def _run(name, *args, **options):
        out = StringIO()
        call_command(name, *args, stdout=out, **options)
        return out.getvalue()

    return _run
