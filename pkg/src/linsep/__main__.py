"""Run as python -m linsep."""
import sys

from .cli import main

sys.exit(main())
