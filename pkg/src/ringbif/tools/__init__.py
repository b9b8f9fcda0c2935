"""Analysis orchestrators shared by the CLI and the MCP server."""
