class DomainError(ValueError):
    """A dimensionless gate parameter left its admissible range."""


class GapOverflowError(DomainError):
    """``|Delta(x)| tau`` exceeded 1; ``site`` is -1 for a lattice-wide gap."""

    def __init__(self, site: int, value: float):
        self.site = site
        self.value = value
        where = "in the global gap" if site < 0 else f"at site {site}"
        super().__init__(f"gap overflow {where}: |Delta| tau = {value:.17g} > 1")


class ConfigError(ValueError):
    """Raised with every diagnostic found while parsing a config file."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))
