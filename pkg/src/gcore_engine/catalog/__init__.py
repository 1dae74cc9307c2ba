"""Graph catalog, storage and table import"""
