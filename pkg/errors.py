class RmLabError(ValueError):
    """Base class for every rejection the tool reports as a one-line diagnostic."""

    tag = "error"

    def __str__(self):
        return f"{self.tag}: {super().__str__()}"


class RejectedInput(RmLabError):
    """Malformed words, length mismatches and out-of-range numbers."""

    tag = "rejected input"


class RejectedConfig(RmLabError):
    """Decoder or harness configurations that violate their invariants."""

    tag = "rejected config"


class ValidityWindowError(RmLabError):
    """
    A bound was requested outside the window where its theorem holds.

    Args:
        theorem (str): Name of the bound that was requested.
        epsilon (float): The offending epsilon.
        edge (float): The window edge epsilon must stay strictly below.
    """

    tag = "validity window"

    def __init__(self, theorem, epsilon, edge):
        self.theorem = theorem
        self.epsilon = epsilon
        self.edge = edge
        super().__init__(f"{theorem} requires 0 < epsilon < {edge:.12g}, got {epsilon:.12g}")
