"""Exception hierarchy shared by the library and the command line front end."""


class TwoBecError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    kind = "error"


class NormalizationError(TwoBecError, ValueError):
    """Input amplitudes are not normalized."""

    exit_code = 2
    kind = "usage"


class ConfigError(TwoBecError, ValueError):
    """Invalid parameters (bad axis label, empty grid, ...)."""

    exit_code = 2
    kind = "usage"

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class ResourceError(TwoBecError):
    """A run would exceed a documented size budget."""

    exit_code = 3
    kind = "resource"

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class NumericalError(TwoBecError, ArithmeticError):
    """A linear-algebra routine or integrator failed."""

    exit_code = 4
    kind = "numerical"


class IntegrationError(NumericalError):
    """Time stepping drifted outside its accuracy bound."""


class DegenerateRatioError(NumericalError):
    """A noiseless reference quantity is zero, so a ratio is undefined."""

    def __init__(self, n, tau):
        self.n = n
        self.tau = tau
        super().__init__(
            f"noiseless log-negativity vanishes at N={n}, tau={tau!r}; ratio undefined"
        )
