import time
from functools import wraps

from .qsystem import MotzkinPath


def timeit(func):
    """Wrap a check so it returns {'passed': bool, 'time_s': seconds}"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        passed = bool(func(*args, **kwargs))
        return {'passed': passed, 'time_s': round(time.perf_counter() - start, 4)}
    return wrapper


def path_slug(m: MotzkinPath) -> str:
    """File-name friendly form of a path: (0,1,2) -> m0-1-2"""
    return "m" + "-".join(str(v) for v in m)


def check_name(suite: str, label: str, m: MotzkinPath = None) -> str:
    return f"{suite}/{label}" + (f"[{m.to_text()}]" if m is not None else "")
