"""Authenticated key establishment for wireless sensor networks: crypto, wire format, protocol engine, simulator, cost model."""
