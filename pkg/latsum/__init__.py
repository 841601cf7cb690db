"""
latsum — 일반화 마델룽 상수 격자합 엔진
"""
__version__ = "0.1.0"
