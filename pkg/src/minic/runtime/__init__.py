from .memory import NULL, AggValue, Frame, GuestPointer, LocationKind, ManagedObject, Memory, MemoryStats

__all__ = ["NULL", "AggValue", "Frame", "GuestPointer", "LocationKind", "ManagedObject", "Memory", "MemoryStats"]
