"""Core configuration, errors and command-line front end"""
