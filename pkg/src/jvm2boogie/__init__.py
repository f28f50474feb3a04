"""jvm2boogie: translate contract-annotated JVM classfiles into Boogie."""

__version__ = "0.1.0"
