"""Core evaluation engine"""
