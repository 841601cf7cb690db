"""
통합 애플리케이션 설정
"""
from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # 병렬 처리 (None 이면 os.cpu_count())
    LATSUM_THREADS: Optional[int] = None

    # 셸 테이블 메모리 상한 (d·(max_n+1) 항목 수)
    LATSUM_MAX_TABLE_ENTRIES: int = 2_000_000_000

    # 직접 열거 상한 (방문 격자점 수)
    LATSUM_ENUMERATION_BUDGET: int = 1_000_000_000

    # 블록합 반경 상한
    LATSUM_MAX_BLOCK_RADIUS: int = 400

    # 그린 함수 주기화 노드 반경 상한 (max-norm)
    LATSUM_MAX_NODE_RADIUS: int = 260

    # 로깅
    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
