import inspect
import numbers
from functools import wraps
from typing import Any, Callable, Dict

from team_variance.exceptions import InvalidArgumentError


def validate_args(validation_rules: Dict[str, Dict[str, Any]]):
    """
    Decorator to validate numeric function arguments before the call.

    Args:
        validation_rules: Dictionary mapping argument names to their validation rules.
            Supported rules:
            - required: bool or dict with 'message' key
            - min: dict with 'value' and 'message' keys (inclusive)
            - max: dict with 'value' and 'message' keys (inclusive)
            - validate: callable that takes the value and returns True/False or error message

    Example:
        @validate_args({
            'delta': {
                'min': {'value': 0.0, 'message': 'delta must be in [0, 1]'},
                'max': {'value': 1.0, 'message': 'delta must be in [0, 1]'},
            },
            'n_starts': {'required': True, 'min': {'value': 1}},
        })
        def mix(delta: float, n_starts: int):
            ...
    """

    def decorator(func: Callable) -> Callable:
        sig = inspect.signature(func)

        @wraps(func)
        def wrapper(*args, **kwargs):
            bound_args = sig.bind(*args, **kwargs)
            bound_args.apply_defaults()

            for arg_name, rules in validation_rules.items():
                if arg_name not in bound_args.arguments:
                    continue

                value = bound_args.arguments[arg_name]

                if "required" in rules:
                    required_rule = rules["required"]
                    if isinstance(required_rule, dict):
                        required = True
                        required_message = required_rule.get(
                            "message", f"{arg_name} is required"
                        )
                    else:
                        required = required_rule
                        required_message = f"{arg_name} is required"

                    if required and value is None:
                        raise InvalidArgumentError(required_message)

                if value is None:
                    continue

                errors = []

                if "min" in rules:
                    min_value = rules["min"].get("value")
                    message = rules["min"].get(
                        "message", f"{arg_name} must be at least {min_value}"
                    )
                    if not _is_number(value):
                        errors.append(f"{arg_name} must be a number")
                    elif value < min_value:
                        errors.append(message)

                if "max" in rules:
                    max_value = rules["max"].get("value")
                    message = rules["max"].get(
                        "message", f"{arg_name} must be at most {max_value}"
                    )
                    if not _is_number(value):
                        errors.append(f"{arg_name} must be a number")
                    elif value > max_value:
                        errors.append(message)

                if "validate" in rules:
                    validate_func = rules["validate"]
                    if callable(validate_func):
                        result = validate_func(value)
                        if result is False:
                            errors.append(f"{arg_name} is invalid")
                        elif isinstance(result, str):
                            errors.append(result)

                if errors:
                    raise InvalidArgumentError(errors[0])

            return func(*args, **kwargs)

        return wrapper

    return decorator


def _is_number(value: Any) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)
