"""
난수 스트림 파생

모든 스트림은 64비트 시드 하나에서 (seed, *keys) 엔트로피로 파생한다.
문자열 키는 sha256 앞 8바이트 정수로 바꾼다.

    rng = derive_rng(seed, "chain", 2)
    rng = derive_rng(master_seed, scenario_id, run_index, "F")
"""
import hashlib
from typing import List, Union

import numpy as np

from foldnorm_sdk.errors import ParameterError

Key = Union[int, str]


def _key_to_int(key: Key) -> int:
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ParameterError(f"시드 키는 음수일 수 없습니다. 입력값={key}")
        return int(key)
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def seed_entropy(seed: int, *keys: Key) -> List[int]:
    if seed < 0:
        raise ParameterError(f"시드는 0 이상이어야 합니다. 입력값={seed}")
    return [int(seed)] + [_key_to_int(k) for k in keys]


def derive_seed_sequence(seed: int, *keys: Key) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed_entropy(seed, *keys))


def derive_rng(seed: int, *keys: Key) -> np.random.Generator:
    """(seed, *keys)로 결정되는 독립 Generator (PCG64)"""
    return np.random.default_rng(derive_seed_sequence(seed, *keys))


__all__ = ["seed_entropy", "derive_seed_sequence", "derive_rng"]
