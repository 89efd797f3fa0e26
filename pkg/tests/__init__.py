"""Unit tests for STSA services, repositories, API and CLI"""
