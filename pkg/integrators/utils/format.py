def fmt_float(value: float) -> str:
    """Format a float with 17 significant digits so it round-trips exactly."""
    return f"{value:.17g}"
