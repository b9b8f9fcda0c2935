"""Static reference resources."""
