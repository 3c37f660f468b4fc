"""Command-line front end: scenario configs, runs, audits, reports."""
