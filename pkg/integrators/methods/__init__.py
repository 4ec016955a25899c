"""One-step methods: underlying methods, discrete gradients and preserving steps."""
