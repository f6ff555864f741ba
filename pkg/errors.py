class LadderSimError(Exception):
    """Base class for every error raised by the simulator."""

    exit_code = 1

    def to_dict(self):
        return {
            'error': type(self).__name__,
            'message': str(self),
            'exit_code': self.exit_code,
        }


class ConfigurationError(LadderSimError, ValueError):
    exit_code = 2


class UnsupportedSchemeError(ConfigurationError):
    pass


class NumericalError(LadderSimError, ArithmeticError):
    exit_code = 3


class DegenerateDynamicsError(NumericalError):
    pass


class ValidityError(LadderSimError, ValueError):
    exit_code = 4


class ShiftUnresolvedError(ValidityError):
    pass
