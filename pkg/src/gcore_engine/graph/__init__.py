"""Graph data model and whole-graph operations"""
