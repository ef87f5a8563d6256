from hypothesis import HealthCheck, settings

# property tests must behave identically on every run, like the seeded
# numerics they sit next to
settings.register_profile(
    "deterministic",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")
