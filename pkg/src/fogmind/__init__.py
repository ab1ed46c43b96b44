"""fogmind: fog-resident ambient-assistance toolkit.

Subpackages: fuzzy (inference engine), rules (rulebook DSL), sim (virtual
home), bus (MQTT transport + offline store), service (decision loop), plus
qr sizing math and the fogmind CLI.
"""

__version__ = "0.1.0"
