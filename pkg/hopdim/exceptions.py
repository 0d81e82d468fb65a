from typing import Any


class GenericError(Exception):
    """
    Generic Error

    Represents a generic error.

    Attributes:
        message (str): The error message.

    Methods:
        __init__(message: str = 'Generic Error'): Initializes the GenericError instance.
        __str__(): Returns the error message as a string.

    Example:
        ```python
        try:
            # Some code that may raise a GenericError
        except GenericError as e:
            print(f"Caught an error: {e}")
        ```
    """

    def __init__(self, message: str = 'Generic Error') -> None:
        """
        Initializes the GenericError instance.

        Args:
            message (str): The error message.
        """
        self.message: str = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Returns the error message as a string.

        Returns:
            str: The error message.
        """
        return self.message


class PreconditionError(GenericError, ValueError):
    """
    Precondition Error

    Occurs when an argument violates a documented bound.

    Attributes:
        name (str): The name of the offending argument.
        value (Any): The value received.
        bound (str): The violated bound, in readable form (e.g. "n <= n_ru = 4").

    Example:
        ```python
        try:
            failure_prob_no_resolution(n=5, d=1, n_ru=4)
        except PreconditionError as e:
            print(e.bound)
        ```
    """

    def __init__(self, name: str, value: Any, bound: str) -> None:
        """
        Initializes the PreconditionError instance.

        Args:
            name (str): The name of the offending argument.
            value (Any): The value received.
            bound (str): The violated bound.
        """
        self.name: str = name
        self.value: Any = value
        self.bound: str = bound
        super().__init__(f'Invalid {name}={value!r}: requires {bound}')


class DomainError(PreconditionError):
    """
    Domain Error

    Occurs when a special function is evaluated outside its real domain.
    """


class InfeasibleFactorizationError(PreconditionError):
    """
    Infeasible Factorization Error

    Occurs when a resource count has no split p x q with both factors at least n,
    so that latin patterns with n repetitions cannot be drawn on it.

    Attributes:
        n_ru (int): The resource unit count.
        n (int): The number of repetitions.
    """

    def __init__(self, n_ru: int, n: int) -> None:
        """
        Initializes the InfeasibleFactorizationError instance.

        Args:
            n_ru (int): The resource unit count.
            n (int): The number of repetitions.
        """
        self.n_ru: int = n_ru
        self.n: int = n
        super().__init__('n_ru', n_ru, f'a latin-feasible factorization p*q with p >= {n} and q >= {n}')
        self.message = f'No latin-feasible factorization of n_ru={n_ru} for n={n}.'

    def __str__(self) -> str:
        return self.message


class RangeError(GenericError):
    """
    Range Error

    Occurs when a result overflows or underflows the floating point range.
    """

    def __init__(self, message: str = 'Range Error') -> None:
        self.message: str = message
        super().__init__(self.message)


class ConvergenceError(GenericError):
    """
    Convergence Error

    Occurs when an iterative method does not reach its tolerance within the
    configured iteration cap, or when a search bracket is not monotone.
    """

    def __init__(self, message: str = 'Convergence Error') -> None:
        self.message: str = message
        super().__init__(self.message)


class StateSpaceTooLargeError(GenericError):
    """
    State Space Too Large Error

    Occurs when an exact enumeration is asked for a joint pattern space above
    the configured limit.

    Attributes:
        size (int): The size of the joint pattern space.
        limit (int): The configured limit.
    """

    def __init__(self, size: int, limit: int) -> None:
        """
        Initializes the StateSpaceTooLargeError instance.

        Args:
            size (int): The size of the joint pattern space.
            limit (int): The configured limit.
        """
        self.size: int = size
        self.limit: int = limit
        self.message: str = f'Joint pattern space of size {size} exceeds the enumeration limit {limit}.'
        super().__init__(self.message)


class StatisticalPreconditionError(GenericError):
    """
    Statistical Precondition Error

    Occurs when a Monte-Carlo search is requested with too few samples for
    the estimate at the target to carry any information.

    Attributes:
        samples (int): The requested samples.
        required (int): The minimum accepted samples.
    """

    def __init__(self, samples: int, required: int) -> None:
        """
        Initializes the StatisticalPreconditionError instance.

        Args:
            samples (int): The requested samples.
            required (int): The minimum accepted samples.
        """
        self.samples: int = samples
        self.required: int = required
        self.message: str = f'samples={samples} is below the required {required} (100 / pf_target).'
        super().__init__(self.message)
