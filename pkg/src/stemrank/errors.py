class DataError(ValueError):
    """Invalid input data: malformed files, broken alignment, out-of-range values.

    Messages name the offending file and 1-based line number where one exists.
    """
