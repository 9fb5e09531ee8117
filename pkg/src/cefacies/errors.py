"""Exception types shared across the package.

The CLI maps these onto exit codes: ``InputError`` -> 2,
``DegenerateError`` -> 3, anything else -> 1.
"""


class InputError(ValueError):
    """Malformed input: bad schema, missing columns, unparseable cells."""


class DegenerateError(ValueError):
    """Input is well-formed but the requested computation is undefined on it."""
