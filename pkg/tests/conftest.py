from hypothesis import HealthCheck, settings

settings.register_profile(
    "roofbound",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("roofbound")
