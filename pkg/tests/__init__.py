#!/usr/bin/env python3
"""
Test package for the pyconformal library
"""
