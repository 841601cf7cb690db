"""
스키마 모듈
"""
# base.py에서 모든 도메인 스키마 import
from latsum.schemas.base import *
# run 스키마 (CLI 요청/응답) import
from latsum.schemas.run import *
