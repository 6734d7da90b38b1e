from hypothesis import settings

# exact arithmetic on big rationals has uneven per-example cost; the
# default 200ms deadline would flake on slower machines
settings.register_profile("exact", deadline=None, max_examples=60)
settings.load_profile("exact")
