"""pymgan test suite"""
