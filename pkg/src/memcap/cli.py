"""Command-line orchestration of the full characterisation pipeline.

Subcommands: synth, preprocess, estimate-state, fit-energy, drift-simulate,
drift-ingest, channel, capacity, pipeline.  Exit codes: 0 success, 1 runtime
failure, 2 invalid input or configuration.  Every stochastic step draws from
an RNG stream derived from (seed, stage, index), never from global state, so
a (config, seed) pair pins every output byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as mio
from .capacity import DelayCurve, delay_sweep
from .config import ENV_CONFIG_PATH, PipelineConfig, load_config
from .device import estimate_state
from .drift import (
    DriftSample,
    empirical_sampler,
    estimate_channel,
    ingest_drift_samples,
    make_grid,
    reference_drift_sample,
    reference_sampler,
)
from .energyfit import (
    EnergyCostModel,
    EnergyObservation,
    SegmentedCycle,
    fit_energy_model,
    observations_from_cycles,
)
from .errors import ConfigError, IngestError, MemcapError, UnderdeterminedFitError
from .plots import write_line_chart
from .signals import (
    MeasurementRecord,
    VITrace,
    align_time,
    correct_offset,
    extract_segments,
    pool_traces,
    segment_cycle,
    synthesize_cycle,
    synthesize_waveform,
    to_vi_trace,
)
from .simulate import simulate_cycle_records

_STAGE_IDS = {"synth": 1, "preprocess": 2, "estimate": 3, "fit": 4, "channel": 5, "capacity": 6}


def _stage_seed(seed: int, stage: str, index: int = 0) -> int:
    return int(np.random.SeedSequence([seed, _STAGE_IDS[stage], index]).generate_state(1)[0])


def _stage_rng(seed: int, stage: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, _STAGE_IDS[stage], index])


def _delay_tag(delay: float) -> str:
    return format(delay, "g").replace(".", "p")


def _set_amplitudes(config: PipelineConfig) -> np.ndarray:
    return np.linspace(
        config.get("experiment", "a_set_lo"),
        config.get("experiment", "a_set_hi"),
        config.get("experiment", "n_amplitudes"),
    )


# ---------------------------------------------------------------- commands


def cmd_synth(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    rate = config.get("experiment", "sample_rate")
    edge = config.get("experiment", "edge_fraction")
    schedule = config.schedule()
    written = []
    for kind in ("read", "set", "reset"):
        v = synthesize_waveform(kind, schedule, rate, edge)
        path = out / f"waveform_{kind}.csv"
        mio.write_waveform_csv(path, np.arange(len(v)) / rate, v)
        written.append(path)
    t, v = synthesize_cycle(schedule, rate, edge)
    path = out / "cycle.csv"
    mio.write_waveform_csv(path, t, v)
    written.append(path)
    for p in written:
        print(p)
    return 0


def cmd_preprocess(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    params = config.device_params()
    loaded = mio.read_trace_csv(args.input)
    trace = to_vi_trace(loaded, params) if isinstance(loaded, MeasurementRecord) else loaded
    if args.n_period:
        trace = align_time(trace, config.alignment(args.n_period))
    corrected, offsets = correct_offset(trace, config.alignment(len(trace)))
    stem = Path(args.input).stem
    trace_path = out / f"{stem}_corrected.csv"
    mio.write_trace_csv(trace_path, corrected)
    print(trace_path)
    print(
        f"dv={mio.fmt(offsets.dv)} di={mio.fmt(offsets.di)} "
        f"objective {mio.fmt(offsets.objective_before)} -> {mio.fmt(offsets.objective_after)}"
    )
    if args.segments:
        rate = config.get("experiment", "sample_rate")
        segments = segment_cycle(corrected, config.schedule(), rate)
        seg_path = out / f"{stem}_segments.csv"
        mio.write_segments_csv(seg_path, segments)
        print(seg_path)
    return 0


def cmd_estimate_state(config: PipelineConfig, args) -> int:
    trace = mio.read_trace_csv(args.input)
    if isinstance(trace, MeasurementRecord):
        trace = to_vi_trace(trace, config.device_params())
    est = estimate_state(trace, config.device_params())
    print(f"x={mio.fmt(est.x)}")
    print(f"r_reported_ohms={mio.fmt(est.r_reported)}")
    print(f"variance_proxy={mio.fmt(est.variance_proxy)}")
    print(f"excluded_pairs={est.excluded_pairs}")
    return 0


def _synthetic_demo_observations(config: PipelineConfig) -> list[EnergyObservation]:
    # 12 programmed levels, 4 repeats each, multiplicative energy noise: the
    # bundled stand-in for the physical programming-energy experiment.
    rng = _stage_rng(config.require_seed(), "fit")
    model = config.energy_model()
    r = np.tile(np.geomspace(2e5, 5e6, 12), 4)
    e = model.a * np.log(model.b / r) * (1.0 + 0.05 * rng.standard_normal(len(r)))
    return [EnergyObservation(r=float(rk), e=float(max(ek, 0.0))) for rk, ek in zip(r, e)]


def _cycles_from_dir(path: Path, params) -> list[SegmentedCycle]:
    """Segmented cycles from a preprocess output directory.

    Expects segments.csv plus one corrected_*.csv device-frame trace per
    cycle; post-SET reads are every segment after the 'set' entry.
    """
    segments = mio.read_segments_csv(path / "segments.csv")
    labels = [lab for lab, *_ in segments]
    if "set" not in labels:
        raise IngestError(f"{path}/segments.csv has no 'set' segment")
    set_idx = labels.index("set")
    cycles = []
    for trace_path in sorted(path.glob("corrected_*.csv")):
        trace = mio.read_trace_csv(trace_path)
        if isinstance(trace, MeasurementRecord):
            trace = to_vi_trace(trace, params)
        parts = extract_segments(trace, segments)
        cycles.append(
            SegmentedCycle(
                set_segment=parts["set"],
                reads_post=tuple(parts[lab] for lab in labels[set_idx + 1 :]),
            )
        )
    if not cycles:
        raise IngestError(f"no corrected_*.csv cycle traces under {path}")
    return cycles


def cmd_fit_energy(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    if args.synthetic_demo:
        observations = _synthetic_demo_observations(config)
        obs_path = out / "observations_demo.csv"
        mio.write_observations_csv(obs_path, observations)
        print(obs_path)
    elif args.observations:
        observations = mio.read_observations_csv(args.observations)
    elif args.cycles:
        cycles = _cycles_from_dir(Path(args.cycles), config.device_params())
        observations = observations_from_cycles(cycles, config.device_params())
    else:
        raise ConfigError("fit-energy needs --observations PATH, --cycles DIR, or --synthetic-demo")
    model, diagnostics = fit_energy_model(observations)
    report = out / "fit_report.csv"
    mio.write_fit_report(report, model, diagnostics, observations)
    print(report)
    print(f"a_joules={mio.fmt(model.a)}")
    print(f"b_ohms={mio.fmt(model.b)}")
    print(f"rss={mio.fmt(diagnostics.rss)}")
    return 0


def cmd_drift_simulate(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    seed = config.require_seed()
    params = config.reference_drift()
    grid = make_grid(config.get("grids", "input_lo"), config.get("grids", "input_hi"), config.get("grids", "input_q"))
    n = config.get("capacity", "n")
    samples = []
    for di, delay in enumerate(config.delays()):
        for xi, r0 in enumerate(grid.centroids):
            rng = _stage_rng(seed, "channel", di * grid.q + xi)
            finals = reference_drift_sample(float(r0), delay, params, rng, size=n)
            samples.extend(
                DriftSample(r_init=float(r0), delay=delay, r_final=float(f)) for f in finals
            )
    path = out / "drift_samples.csv"
    mio.write_drift_samples(path, samples)
    print(path)
    print(f"rows={len(samples)}")
    return 0


def cmd_drift_ingest(config: PipelineConfig, args) -> int:
    samples, rejected = ingest_drift_samples(args.input)
    print(f"accepted={len(samples)}")
    print(f"rejected={len(rejected)}")
    for line, reason in rejected:
        print(f"line {line}: {reason}", file=sys.stderr)
    if args.output:
        mio.write_drift_samples(args.output, samples)
        print(args.output)
    return 0


def _drift_sampler(config: PipelineConfig):
    source = config.get("drift", "source")
    if source == "reference":
        return reference_sampler(config.reference_drift())
    if source == "file":
        path = config.get("drift", "samples_path")
        if not path:
            raise ConfigError("[drift] samples_path is required when source=file")
        samples, rejected = ingest_drift_samples(path)
        if rejected:
            raise IngestError(f"{path}: {len(rejected)} malformed rows, first at line {rejected[0][0]}")
        return empirical_sampler(samples)
    raise ConfigError(f"[drift] source must be 'reference' or 'file', got {source!r}")


def _build_channels(config: PipelineConfig, energy_model: EnergyCostModel, seed: int):
    sampler = _drift_sampler(config)
    input_grid = make_grid(
        config.get("grids", "input_lo"), config.get("grids", "input_hi"), config.get("grids", "input_q")
    )
    output_grid = make_grid(
        config.get("grids", "output_lo"), config.get("grids", "output_hi"), config.get("grids", "output_q")
    )
    n = config.get("capacity", "n")
    channels = []
    for di, delay in enumerate(config.delays()):
        channels.append(
            estimate_channel(
                sampler,
                input_grid,
                output_grid,
                delay,
                n,
                energy_model,
                seed=_stage_seed(seed, "channel", di),
            )
        )
    return channels


def cmd_channel(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    seed = config.require_seed()
    channels = _build_channels(config, config.energy_model(), seed)
    for matrix in channels:
        path = out / f"channel_d{_delay_tag(matrix.delay)}.csv"
        mio.write_channel_csv(path, matrix, seed=seed)
        print(path)
    return 0


def _write_curves(config: PipelineConfig, out: Path, curves: list[DelayCurve]) -> list[Path]:
    written = []
    for curve in curves:
        tag = _delay_tag(curve.delay)
        path = out / f"curve_d{tag}.csv"
        mio.write_curve_csv(path, curve.delay, curve.points)
        written.append(path)
        if config.get("capacity", "write_distributions"):
            dist_path = out / f"distributions_d{tag}.csv"
            mio.write_input_distributions_csv(dist_path, curve.delay, curve.points)
            written.append(dist_path)
    summary = out / "capacity_summary.csv"
    with open(summary, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(mio.CURVE_HEADER + "\n")
        for curve in curves:
            for pt in curve.points:
                fh.write(
                    f"{mio.fmt(curve.delay)},{mio.fmt(pt.s)},{mio.fmt(pt.avg_energy)},"
                    f"{mio.fmt(pt.capacity)},{mio.fmt(pt.gap)},{int(pt.converged)}\n"
                )
    written.append(summary)
    if config.get("capacity", "plots"):
        plot_path = out / "capacity_curves.svg"
        write_line_chart(
            plot_path,
            [
                (
                    f"delay {format(curve.delay, 'g')} min",
                    [pt.avg_energy for pt in curve.points],
                    [pt.capacity for pt in curve.points],
                )
                for curve in curves
            ],
            title="capacity vs average symbol energy",
            x_label="average energy per symbol (J)",
            y_label="capacity (bits)",
        )
        written.append(plot_path)
    return written


def cmd_capacity(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    tol = config.get("capacity", "tol")
    max_iter = config.get("capacity", "max_iter")
    if args.channels:
        matrices = [mio.read_channel_csv(p) for p in args.channels]
    else:
        matrices = _build_channels(config, config.energy_model(), config.require_seed())
    curves = delay_sweep(matrices, config.s_grid(), tol=tol, max_iter=max_iter)
    for path in _write_curves(config, out, curves):
        print(path)
    return 0


# ---------------------------------------------------------------- pipeline


def _pipeline_synth(config: PipelineConfig, out: Path, seed: int) -> tuple[list[Path], list]:
    rate = config.get("experiment", "sample_rate")
    edge = config.get("experiment", "edge_fraction")
    outputs = []
    for kind in ("read", "set", "reset"):
        v = synthesize_waveform(kind, config.schedule(), rate, edge)
        path = out / f"waveform_{kind}.csv"
        mio.write_waveform_csv(path, np.arange(len(v)) / rate, v)
        outputs.append(path)
    params = config.device_params()
    gen_model = config.generation_energy_model()
    noise = config.get("experiment", "programming_noise")
    read_noise = config.get("experiment", "read_noise")
    cycles = []
    index = 0
    for ai, a_set in enumerate(_set_amplitudes(config)):
        schedule = config.schedule(a_set=float(a_set))
        for rep in range(config.get("experiment", "repeats")):
            sim = simulate_cycle_records(
                schedule,
                params,
                gen_model,
                rate,
                rng=_stage_rng(seed, "synth", index),
                programming_noise=noise,
                read_noise=read_noise,
                dv_offset=config.get("experiment", "inject_dv"),
                di_offset=config.get("experiment", "inject_di"),
                lead_in=config.get("experiment", "lead_in"),
                edge_fraction=edge,
            )
            path = out / f"records_a{ai:02d}_r{rep}.csv"
            mio.write_records_csv(path, sim.records)
            outputs.append(path)
            cycles.append((ai, rep, float(a_set), path))
            index += 1
    return outputs, cycles


def _pipeline_preprocess(config: PipelineConfig, out: Path, cycles: list) -> tuple[list[Path], list]:
    rate = config.get("experiment", "sample_rate")
    params = config.device_params()
    outputs = []
    corrected_cycles = []
    segments_path = out / "segments.csv"
    for ai, rep, a_set, records_path in cycles:
        schedule = config.schedule(a_set=a_set)
        records = mio.read_trace_csv(records_path)
        trace = to_vi_trace(records, params)
        n_period = int(round(schedule.cycle_span() * rate))
        alignment = config.alignment(n_period)
        if alignment.n_discard_max is None:
            # the discard window must cover the simulated pre-trigger samples
            window = max(len(trace) // 10, config.get("experiment", "lead_in") + 1)
            alignment = replace(alignment, n_discard_max=window)
        aligned = align_time(trace, alignment)
        segments = segment_cycle(aligned, schedule, rate)
        parts = extract_segments(aligned, segments)
        first_read = next(lab for lab, *_ in segments if lab.startswith("read"))
        _, offsets = correct_offset(parts[first_read], config.alignment(len(parts[first_read])))
        fixed = VITrace(t=aligned.t, v=aligned.v + offsets.dv, i=aligned.i + offsets.di)
        path = out / f"corrected_a{ai:02d}_r{rep}.csv"
        mio.write_trace_csv(path, fixed)
        outputs.append(path)
        corrected_cycles.append((ai, rep, a_set, fixed, segments))
        if not segments_path.exists():
            mio.write_segments_csv(segments_path, segments)
            outputs.append(segments_path)
    return outputs, corrected_cycles


def _pipeline_estimate(config: PipelineConfig, out: Path, corrected_cycles: list) -> tuple[list[Path], list]:
    params = config.device_params()
    schedule = config.schedule()
    estimates_path = out / "estimates.csv"
    observations = []
    rows = []
    for ai, rep, a_set, trace, segments in corrected_cycles:
        parts = extract_segments(trace, segments)
        labels = [lab for lab, *_ in segments]
        pre_reads = [parts[lab] for lab in labels[1 : 1 + schedule.reads_after_reset]]
        post_reads = [parts[lab] for lab in labels[2 + schedule.reads_after_reset :]]
        cycle = SegmentedCycle(set_segment=parts["set"], reads_post=tuple(post_reads))
        (obs,) = observations_from_cycles([cycle], params)
        pre = estimate_state(pool_traces(pre_reads), params) if pre_reads else None
        observations.append(obs)
        rows.append((ai, rep, a_set, pre.r_reported if pre else float("nan"), obs.r, obs.e))
    with open(estimates_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("amplitude_index,repeat,a_set_volts,r_pre_ohms,r_post_ohms,e_set_joules\n")
        for ai, rep, a_set, r_pre, r_post, e in rows:
            fh.write(f"{ai},{rep},{mio.fmt(a_set)},{mio.fmt(r_pre)},{mio.fmt(r_post)},{mio.fmt(e)}\n")
    obs_path = out / "observations.csv"
    mio.write_observations_csv(obs_path, observations)
    return [estimates_path, obs_path], observations


def _pipeline_fit(config: PipelineConfig, out: Path, observations) -> tuple[list[Path], EnergyCostModel]:
    model, diagnostics = fit_energy_model(observations)
    report = out / "fit_report.csv"
    mio.write_fit_report(report, model, diagnostics, observations)
    outputs = [report]
    if config.get("capacity", "plots"):
        from .energyfit import energy_cost

        r_obs = np.array([ob.r for ob in observations])
        r_curve = np.geomspace(r_obs.min(), max(r_obs.max(), model.b * 0.999), 200)
        plot_path = out / "energy_fit.svg"
        write_line_chart(
            plot_path,
            [("fitted cost curve", r_curve, energy_cost(r_curve, model))],
            scatter=[("measured", r_obs, [ob.e for ob in observations])],
            title="SET energy vs programmed state",
            x_label="state (ohms)",
            y_label="energy (J)",
            log_x=True,
        )
        outputs.append(plot_path)
    return outputs, model


def _pipeline_channel(config: PipelineConfig, out: Path, seed: int, fitted: EnergyCostModel) -> tuple[list[Path], list]:
    model = fitted if config.get("energy", "use_fitted") else config.energy_model()
    channels = _build_channels(config, model, seed)
    outputs = []
    for matrix in channels:
        path = out / f"channel_d{_delay_tag(matrix.delay)}.csv"
        mio.write_channel_csv(path, matrix, seed=seed)
        outputs.append(path)
    if config.get("capacity", "plots") and config.get("drift", "source") == "reference":
        from .drift import reference_drift_series

        params = config.reference_drift()
        t_grid = np.arange(0.0, 101.0)
        series = []
        for k, r0 in enumerate(np.geomspace(1.5e5, 1e8, 6)):
            rng = _stage_rng(seed, "channel", 10_000 + k)
            s = reference_drift_series(float(r0), t_grid, params, rng)
            series.append((f"start {format(r0, '.2g')} ohm", s.t, np.log10(s.r)))
        plot_path = out / "drift_series.svg"
        write_line_chart(
            plot_path,
            series,
            title="reference drift toward equilibrium",
            x_label="time (min)",
            y_label="log10 state (ohms)",
        )
        outputs.append(plot_path)
    return outputs, channels


def _pipeline_capacity(config: PipelineConfig, out: Path, channels: list) -> list[Path]:
    curves = delay_sweep(
        channels,
        config.s_grid(),
        tol=config.get("capacity", "tol"),
        max_iter=config.get("capacity", "max_iter"),
    )
    return _write_curves(config, out, curves)


def cmd_pipeline(config: PipelineConfig, args) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    seed = config.require_seed()
    manifest = {
        "config_hash": config.config_hash(),
        "seed": seed,
        "stages": [],
    }
    manifest_path = out / "manifest.json"

    def record(name: str, outputs: list[Path]) -> None:
        manifest["stages"].append({"name": name, "outputs": sorted(str(p.relative_to(out)) for p in outputs)})

    try:
        outputs, cycles = _pipeline_synth(config, out, seed)
        record("synth", outputs)
        outputs, corrected = _pipeline_preprocess(config, out, cycles)
        record("preprocess", outputs)
        outputs, observations = _pipeline_estimate(config, out, corrected)
        record("estimate", outputs)
        outputs, fitted = _pipeline_fit(config, out, observations)
        record("fit", outputs)
        outputs, channels = _pipeline_channel(config, out, seed, fitted)
        record("channel", outputs)
        outputs = _pipeline_capacity(config, out, channels)
        record("capacity", outputs)
    except MemcapError as exc:
        manifest["failed_stage"] = f"{type(exc).__name__}: {exc}"
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        raise
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(manifest_path)
    for stage in manifest["stages"]:
        print(f"stage {stage['name']}: {len(stage['outputs'])} outputs")
    return 0


# ---------------------------------------------------------------- wiring


def _overrides_from(args) -> dict:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides[("run", "seed")] = args.seed
    if getattr(args, "out_dir", None):
        overrides[("run", "out_dir")] = args.out_dir
    for attr, target in (
        ("delays", ("capacity", "delays")),
        ("n", ("capacity", "n")),
        ("source", ("drift", "source")),
        ("samples", ("drift", "samples_path")),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[target] = value
    if getattr(args, "plots", False):
        overrides[("capacity", "plots")] = True
    return overrides


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"INI config path (default: ${ENV_CONFIG_PATH})")
    common.add_argument("--seed", type=int, help="root seed for all stochastic steps")
    common.add_argument("--out-dir", help="output directory (default: ./out)")

    parser = argparse.ArgumentParser(prog="memcap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write READ/SET/RESET and composite cycle waveforms")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", parents=[common], help="convert, align, and offset-correct a trace")
    p.add_argument("input", help="trace CSV (t,v,i or t,v_total,v_series)")
    p.add_argument("--n-period", type=int, default=0, help="align and trim to this many samples")
    p.add_argument("--segments", action="store_true", help="also write the segment index CSV")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("estimate-state", parents=[common], help="state estimate for a device-frame trace")
    p.add_argument("input")
    p.set_defaults(func=cmd_estimate_state)

    p = sub.add_parser("fit-energy", parents=[common], help="fit the programming-energy cost model")
    p.add_argument("--observations", help="CSV of r_ohms,e_joules")
    p.add_argument("--cycles", help="preprocess output dir (corrected_*.csv + segments.csv)")
    p.add_argument("--synthetic-demo", action="store_true", help="fit the bundled synthetic dataset")
    p.set_defaults(func=cmd_fit_energy)

    p = sub.add_parser("drift-simulate", parents=[common], help="export reference-drift samples")
    p.add_argument("--delays", help="comma-separated delays in minutes")
    p.add_argument("--n", type=int, help="samples per (state, delay) cell")
    p.set_defaults(func=cmd_drift_simulate)

    p = sub.add_parser("drift-ingest", parents=[common], help="validate a drift-sample interchange file")
    p.add_argument("input")
    p.add_argument("--output", help="write the validated rows back out")
    p.set_defaults(func=cmd_drift_ingest)

    p = sub.add_parser("channel", parents=[common], help="estimate per-delay channel matrices")
    p.add_argument("--delays", help="comma-separated delays in minutes")
    p.add_argument("--n", type=int, help="simulations per input level")
    p.add_argument("--source", choices=("reference", "file"), help="drift sampler source")
    p.add_argument("--samples", help="drift-sample CSV when --source file")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("capacity", parents=[common], help="capacity-cost curves per delay")
    p.add_argument("--channels", nargs="*", help="channel CSV files (default: build from drift source)")
    p.add_argument("--delays", help="comma-separated delays in minutes")
    p.add_argument("--n", type=int, help="simulations per input level")
    p.add_argument("--source", choices=("reference", "file"))
    p.add_argument("--samples")
    p.add_argument("--plots", action="store_true", help="also write an SVG chart")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("pipeline", parents=[common], help="run all six stages and write a manifest")
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(getattr(args, "config", None), _overrides_from(args))
        return args.func(config, args)
    except (ConfigError, IngestError, UnderdeterminedFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MemcapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
