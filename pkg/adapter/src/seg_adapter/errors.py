class AdapterError(Exception):
    """Video cannot be decoded, or the requested model is unavailable."""
