import pytest

from icb.config import (
    ConfigError,
    ScenarioConfig,
    emit_config,
    format_size,
    parse_config,
    parse_size,
    parse_sweep,
    presets,
)

KB, MB, GB, TB = 1024, 1024**2, 1024**3, 1024**4

SCENARIO_ROWS = {
    "isp-100GB": ("ISP", 10**12, 10 * KB, 0.65, 100 * GB),
    "isp-1TB": ("ISP", 10**12, 10 * KB, 0.65, 1 * TB),
    "vod-25GB": ("VOD", 10**9, 100 * MB, 0.75, 25 * GB),
    "vod-250GB": ("VOD", 10**9, 100 * MB, 0.75, 250 * GB),
    "osn-10GB": ("OSN", 10**8, 10 * MB, 1.14, 10 * GB),
    "osn-100GB": ("OSN", 10**8, 10 * MB, 1.14, 100 * GB),
}


@pytest.mark.parametrize("text, n", [("4KB", 4096), ("100GB", 100 * GB), ("1TB", TB), ("512", 512), ("1.5KB", 1536)])
def test_parse_size(text, n):
    assert parse_size(text) == n


@pytest.mark.parametrize("text", ["", "4XB", "0.3B", "lots"])
def test_parse_size_rejects(text):
    with pytest.raises(ConfigError):
        parse_size(text)


def test_format_size_prefers_largest_unit():
    assert format_size(25 * GB) == "25GB" and format_size(1536) == "1536" and format_size(0) == "0"


def test_presets_match_scenario_rows_before_scaling():
    got = presets()
    assert set(got) == set(SCENARIO_ROWS)
    for key, (name, n, size, alpha, cache) in SCENARIO_ROWS.items():
        cfg = got[key]
        assert (cfg.name, cfg.n_objects, cfg.avg_filesize, cfg.alpha, cfg.cache_bytes) == (name, n, size, alpha, cache)
        assert cfg.chunk_size == 4 * KB and cfg.beta == 0.0 and cfg.duration == 86_400.0


@pytest.mark.parametrize("key", sorted(SCENARIO_ROWS))
def test_presets_have_usable_desk_scale(key):
    cfg = presets()[key]
    assert cfg.cache_chunks >= cfg.chunks_per_object
    assert 3 <= cfg.chunks_per_object <= 4
    # byte ratio of cache to catalog is what scaling preserves
    real = cfg.cache_bytes / (cfg.n_objects * cfg.avg_filesize)
    desk = cfg.cache_chunks * cfg.sim_chunk_size / (cfg.scaled_objects * cfg.chunks_per_object * cfg.sim_chunk_size)
    assert desk == pytest.approx(real, rel=0.35)


@pytest.mark.parametrize("key", sorted(SCENARIO_ROWS))
def test_preset_round_trip(key):
    cfg = presets(strategy="MAGIC", seed=12)[key]
    assert parse_config(emit_config(cfg, comment="x\ny")) == cfg


def test_round_trip_clients_and_floats():
    cfg = ScenarioConfig(clients=(4, 1, 2), t_tw=0.1, scale=3.0, warmup=0.0)
    assert parse_config(emit_config(cfg)) == cfg


def test_unknown_key_is_an_error():
    with pytest.raises(ConfigError, match="unknown key 'cache'"):
        parse_config("cache = 1GB\n")


def test_bad_values_reported_with_line():
    with pytest.raises(ConfigError, match="<config>:2"):
        parse_config("alpha = 1\nn_objects = many\n")


@pytest.mark.parametrize(
    "line", ["strategy = SACS", "policy = MRU", "duration = 0", "scale = 0.5", "n_objects = 0", "t_tw = 0"]
)
def test_invalid_configs_rejected(line):
    with pytest.raises(ConfigError):
        parse_config(line)


def test_strategy_alias_normalised():
    assert parse_config("strategy = 2-lru").strategy == "TWO_LRU"


def test_config_hash_ignores_seed_only():
    a = ScenarioConfig(seed=1)
    assert a.config_hash() == ScenarioConfig(seed=2).config_hash()
    assert a.config_hash() != ScenarioConfig(seed=1, alpha=1.0).config_hash()


def test_sweep_cross_product_in_file_order():
    spec = parse_sweep("alpha = 0.7\nsweep.strategy = LCE, LCD\nsweep.cache_bytes = 4KB, 8KB\nseeds = 1, 2\n")
    got = [(c.strategy, c.cache_bytes, c.seed) for c in spec.configs()]
    assert got == [
        (s, b, seed) for s in ("LCE", "LCD") for b in (4 * KB, 8 * KB) for seed in (1, 2)
    ]
    assert all(c.alpha == 0.7 for c in spec.configs())


def test_sweep_without_axes_is_one_run_per_seed():
    assert len(parse_sweep("seeds = 5 6 7").configs()) == 3


@pytest.mark.parametrize("text", ["sweep.colour = a", "sweep.seed = 1,2", "sweep.alpha = ", "sweep.alpha = x"])
def test_bad_sweeps(text):
    with pytest.raises(ConfigError):
        parse_sweep(text)
