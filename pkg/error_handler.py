# error_handler.py
import logging
import sys
from typing import Optional, TextIO

from constants import CliConfig


class RewriteKitError(Exception):
    """Base class for every error the workbench reports to a user."""

    exit_code = CliConfig.EXIT_INPUT_ERROR

    def describe(self) -> str:
        return str(self)


class InputError(RewriteKitError):
    """Malformed or ill-typed input."""

    exit_code = CliConfig.EXIT_INPUT_ERROR


class BoundExhausted(RewriteKitError):
    """A fuel, depth or node bound ran out before an answer was found."""

    exit_code = CliConfig.EXIT_BOUND_EXHAUSTED


class UsageError(RewriteKitError):
    """Bad command line: unknown system, unknown suite, bad flag."""

    exit_code = CliConfig.EXIT_USAGE


class ErrorHandler:

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        if isinstance(error, RewriteKitError):
            return error.exit_code
        return CliConfig.EXIT_INPUT_ERROR

    @staticmethod
    def handle_command_error(command_name: str, error: BaseException,
                             stream: Optional[TextIO] = None) -> int:
        """A centralized handler for command errors. Returns the exit code."""
        stream = stream or sys.stderr

        if isinstance(error, UsageError):
            logging.warning(f"⚠️ Usage error in '{command_name}': {error}")
            message = f"usage: {error.describe()}"
        elif isinstance(error, BoundExhausted):
            logging.warning(f"⚠️ Bound exhausted in '{command_name}': {error}")
            message = f"bound exhausted: {error.describe()}"
        elif isinstance(error, RewriteKitError):
            logging.info(f"❌ Command '{command_name}' rejected input: {error}")
            message = f"error: {error.describe()}"
        else:
            logging.error(f"Error in command '{command_name}': {error}", exc_info=error)
            message = f"error: unexpected failure in {command_name}: {error}"

        try:
            print(message, file=stream)
        except Exception as e:
            logging.error(f"Failed to write error message: {e}")

        return ErrorHandler.exit_code_for(error)
