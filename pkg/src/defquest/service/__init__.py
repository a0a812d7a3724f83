"""Review service: HTTP API over an append-only event log."""
