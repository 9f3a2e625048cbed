from hypothesis import settings

# the same examples on every run, so a red or green result is reproducible
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
