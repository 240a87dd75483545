__version__ = "0.1.0"

TOOL_NAME = "cuflinks"
USER_AGENT = f"{TOOL_NAME}/{__version__}"
