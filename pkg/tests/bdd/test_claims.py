"""BDD scenarios for the spinext command line."""

import json
import shlex

import pytest
from pytest_bdd import parsers, scenarios, then, when

from tests.utils import error_payload, run_cli

scenarios("features/claims.feature")


@pytest.fixture
def cli_result():
    """Store CLI command results."""
    return {"returncode": None, "stdout": None, "stderr": None}


@when(parsers.parse('I run spinext "{command}"'))
def run_spinext(cli_result, command):
    rc, out, err = run_cli([*shlex.split(command), "--format", "json"])
    cli_result.update(returncode=rc, stdout=out, stderr=err)


def _result(cli_result):
    return json.loads(cli_result["stdout"])["result"]


@then("the command should succeed")
def command_should_succeed(cli_result):
    assert cli_result["returncode"] == 0, cli_result["stderr"]


@then(parsers.parse("the command should fail with exit code {code:d}"))
def command_should_fail(cli_result, code):
    assert cli_result["returncode"] == code


@then(parsers.parse('the result field "{name}" should be {value}'))
def result_field_equals(cli_result, name, value):
    assert _result(cli_result)[name] == json.loads(value)


@then(parsers.parse('the result list "{name}" should be "{items}"'))
def result_list_equals(cli_result, name, items):
    assert _result(cli_result)[name] == items.split()


@then(parsers.parse('the error type should be "{error_type}"'))
def error_type_is(cli_result, error_type):
    assert error_payload(cli_result["stderr"])["type"] == error_type
