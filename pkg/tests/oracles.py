"""Test-suite alias for the package's brute-force reference oracles."""

from tsirkit.oracles import *  # noqa: F401,F403
