"""
Services package - band maps, isometries, classification and self-test suites.
"""
