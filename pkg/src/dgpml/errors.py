"""Exception types shared across the solver, mapped to CLI exit codes."""


class ConfigError(Exception):
    """Invalid configuration or invalid build parameters (exit code 2)."""


class MeshError(Exception):
    """Unreadable, unsupported or inconsistent mesh input (exit code 3)."""


class InstabilityError(Exception):
    """Non-finite field values detected during time stepping (exit code 4)."""

    def __init__(self, step_index, stage, detail=""):
        self.step_index = step_index
        self.stage = stage
        msg = f"non-finite field values at step {step_index}, stage {stage}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
