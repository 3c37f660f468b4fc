"""Allow running the CLI as ``python -m galimech``."""

from .harness.cli import main

raise SystemExit(main())
