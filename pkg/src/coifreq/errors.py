"""Structured exception hierarchy.

Every error carries a machine-readable ``code`` and the originating module
name so the CLI can emit structured error JSON and map to exit codes.
"""


class CoifreqError(Exception):
    code = "error"
    module = "coifreq"
    exit_code = 3

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json_dict(self):
        return {
            "code": self.code,
            "module": self.module,
            "message": self.message,
            "details": self.details,
        }


# --- ingest ---

class FormatError(CoifreqError):
    code = "format_error"
    module = "ingest"


class DataError(CoifreqError):
    code = "data_error"
    module = "ingest"


class AlignmentError(CoifreqError):
    code = "alignment_error"
    module = "ingest"


# --- event_detect ---

class NoEventError(CoifreqError):
    code = "no_event"
    module = "event_detect"
    exit_code = 4


class TruncatedWindowError(CoifreqError):
    """Requested fit window runs past the data; carries the largest feasible K."""

    code = "truncated_window"
    module = "event_detect"
    exit_code = 4

    def __init__(self, message, max_feasible_k, **details):
        super().__init__(message, max_feasible_k=max_feasible_k, **details)
        self.max_feasible_k = max_feasible_k


class WindowRangeError(CoifreqError):
    code = "range_error"
    module = "event_detect"


# --- coi_core ---

class UnderdeterminedError(CoifreqError):
    code = "underdetermined"
    module = "coi_core"
    exit_code = 5


class WindowInvalidError(CoifreqError):
    code = "window_invalid"
    module = "coi_core"
    exit_code = 5


class SingularSystemError(CoifreqError):
    code = "singular_system"
    module = "coi_core"
    exit_code = 5


class DegenerateWeightsError(CoifreqError):
    code = "degenerate_weights"
    module = "coi_core"
    exit_code = 5


# --- magnitude ---

class EmptyFleetError(CoifreqError):
    code = "empty_fleet"
    module = "magnitude"


# --- sim_oracle ---

class ScenarioError(CoifreqError):
    code = "schema_error"
    module = "sim_oracle"


class InstabilityError(CoifreqError):
    code = "instability"
    module = "sim_oracle"
    exit_code = 6

    def __init__(self, message, step, **details):
        super().__init__(message, step=step, **details)
        self.step = step
