"""
Command-line harness for STSA blocks.

Usage:
    stsa --seed 0 gen-data --dims 16,16,16,8
    stsa extract-flow --poses runs/poses.json --size 16x16 --sigma 2 --out runs/flows.mfl
    stsa run-block --input runs/video.lvt --flows runs/flows.mfl --subspace 4,4,4 --shifted --out runs/y.lvt
    stsa benchmark --mode subspace --dims 16,16,16,64,64 --subspace 4,4,4
    stsa train-toy --steps 200 --lr 0.05
    stsa sweep --sizes 4,2,2 4,4,4 8,4,4
    stsa report
    stsa serve
"""
import argparse
import logging
import sys
from pathlib import Path

from stsa import __version__
from stsa.core.config import Settings, override_settings, settings
from stsa.core.errors import ConfigurationError, StsaError
from stsa.core.logging_config import configure_logging
from stsa.core.rng import STREAM_PARAMS, make_rng
from stsa.models.attention import AttentionParams, MacCounter
from stsa.models.latent import LatentVideo
from stsa.repositories.alignment_repository import AlignmentRepository
from stsa.repositories.flow_repository import FlowRepository
from stsa.repositories.pose_repository import PoseRepository
from stsa.repositories.report_repository import ResultRepository, TableRepository
from stsa.repositories.scene_repository import SceneRepository
from stsa.repositories.tensor_repository import ParamsRepository, TensorRepository
from stsa.schemas.block import BlockConfig
from stsa.schemas.report import RunResult
from stsa.schemas.scene import SceneObject, SceneSpec
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.attention_service import AttentionService
from stsa.services.block_service import BlockService
from stsa.services.cost_service import CostService
from stsa.services.flow_service import FlowService
from stsa.services.metrics_service import MetricsService
from stsa.services.report_service import ReportService
from stsa.services.scene_service import SceneService
from stsa.services.sweep_service import DEFAULT_SIZES, SweepService
from stsa.services.training_service import TrainingService

logger = logging.getLogger("stsa.cli")

EXIT_ERROR = 2


def parse_ints(text: str, count: int, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p) for p in text.split(","))
    except ValueError as e:
        raise ConfigurationError(f"{what} must be {count} comma-separated integers, got {text!r}") from e
    if len(values) != count:
        raise ConfigurationError(f"{what} must be {count} comma-separated integers, got {text!r}")
    return values


def parse_size(text: str) -> tuple[int, int]:
    """``HxW`` -> (H, W)."""
    try:
        height, width = (int(p) for p in text.lower().split("x"))
    except ValueError as e:
        raise ConfigurationError(f"size must be HxW, got {text!r}") from e
    return height, width


def scene_from_args(args: argparse.Namespace) -> SceneSpec:
    """Scene from ``--scene`` JSON, else a single object built from the flags."""
    if args.scene:
        try:
            return SceneSpec.model_validate_json(Path(args.scene).read_text())
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"cannot read scene {args.scene}: {e}") from e
    frames, height, width, channels = parse_ints(args.dims, 4, "--dims")
    obj = SceneObject(
        shape=args.shape, size=args.object_size,
        velocity=parse_ints(args.velocity, 2, "--velocity"), pattern=args.pattern,
    )
    try:
        return SceneSpec(frames=frames, height=height, width=width, channels=channels, objects=[obj])
    except ValueError as e:
        raise ConfigurationError(str(e)) from e


def out_path(cfg: Settings, given: str | None, default: str) -> Path:
    return Path(given) if given else Path(cfg.out_dir) / default


def write_result(cfg: Settings, result: RunResult, given: str | None, default: str) -> Path:
    path = ResultRepository().save(result, out_path(cfg, given, default))
    logger.info(f"Wrote {result.kind} result to {path}")
    return path


def cmd_gen_data(args: argparse.Namespace, cfg: Settings) -> int:
    scene = scene_from_args(args)
    video, poses, flows = SceneService().gen_scene(scene, cfg.seed)
    video = video.astype(cfg.dtype)
    out_dir = Path(cfg.out_dir)
    TensorRepository().save(video, out_dir / "video.lvt")
    FlowRepository().save(flows, out_dir / "flows.mfl")
    PoseRepository().save(poses, out_dir / "poses.json")
    SceneRepository().save(scene, out_dir / "scene.json")
    if args.pgm_dir:
        TensorRepository().save_pgm_sequence(video, args.pgm_dir)
    spec = SubspaceSpec.parse(cfg.subspace)
    metrics = MetricsService()
    metadata = metrics.metadata("gen-data", cfg.seed, cfg.precision, video.shape, spec)
    report = metrics.consistency_report(video, flows, spec, video.channels, metadata)
    write_result(cfg, RunResult(kind="consistency", run="gen-data", metadata=metadata, consistency=report),
                 None, "consistency.json")
    return 0


def cmd_extract_flow(args: argparse.Namespace, cfg: Settings) -> int:
    height, width = parse_size(args.size)
    poses = PoseRepository(default_width=width, default_height=height).load(args.poses)
    flow_service = FlowService()
    flows = flow_service.synth_flow_from_poses(poses, height, width, args.sigma)
    if args.downsample > 1:
        flows = flow_service.downsample_set(flows, args.downsample)
    path = FlowRepository().save(flows, out_path(cfg, args.out, "flows.mfl"))
    logger.info(f"Wrote {flows.frames - 1} flow pairs to {path}")
    return 0


def load_params(args: argparse.Namespace, cfg: Settings, channels: int) -> AttentionParams:
    heads = args.heads or cfg.heads
    if args.params:
        return ParamsRepository(heads).load(args.params).astype(cfg.dtype)
    dim = args.dim or channels
    return AttentionParams.random(channels, dim, make_rng(cfg.seed, STREAM_PARAMS), heads, dtype=cfg.dtype)


def cmd_run_block(args: argparse.Namespace, cfg: Settings) -> int:
    x = TensorRepository().load(args.input).astype(cfg.dtype)
    flow_service = FlowService()
    flows = flow_service.fit_to_grid(FlowRepository().load(args.flows), x.height, x.width)
    spec = SubspaceSpec.parse(args.subspace or cfg.subspace)
    params = load_params(args, cfg, x.channels)
    block = BlockService(settings=cfg)
    plan = block.plan(x.grid, flows, spec, shifted=args.shifted, aligned=not args.unaligned)
    residual = False if args.no_residual else None
    y = block.forward(x, plan, params, residual=residual)
    path = TensorRepository().save(y, out_path(cfg, args.out, "block.lvt"))
    logger.info(f"Wrote block output {y.shape} to {path}")
    if args.dump_maps:
        if not plan.aligned:
            logger.warning("--dump-maps ignored for an unaligned block")
        else:
            AlignmentRepository().save(plan.maps, args.dump_maps)
    return 0


def cmd_benchmark(args: argparse.Namespace, cfg: Settings) -> int:
    frames, height, width, channels, dim = parse_ints(args.dims, 5, "--dims")
    spec = SubspaceSpec.parse(args.subspace or cfg.subspace) if args.mode == "subspace" else None
    heads = args.heads or cfg.heads
    report = CostService().cost_model(args.mode, frames, height, width, channels, dim, spec, heads)
    if args.verify:
        counter = MacCounter()
        rng = make_rng(cfg.seed, STREAM_PARAMS)
        x = LatentVideo(rng.standard_normal((frames, height, width, channels)).astype(cfg.dtype))
        params = AttentionParams.random(channels, dim, rng, heads, dtype=cfg.dtype)
        AttentionService(settings=cfg).run_mode(args.mode, x, params, spec, counter)
        if (counter.projection, counter.score, counter.value) != (
            report.projection_macs, report.score_macs, report.value_macs
        ):
            raise StsaError(f"instrumented MACs {counter} disagree with the cost model")
        logger.info("Instrumented MAC counts match the cost model")
    metadata = MetricsService.metadata("benchmark", cfg.seed, cfg.precision, (frames, height, width, channels), spec)
    write_result(cfg, RunResult(kind="benchmark", run=f"benchmark-{args.mode}", metadata=metadata, benchmark=report),
                 args.out, f"benchmark-{args.mode}.json")
    print(report.model_dump_json(indent=2))
    return 0


def cmd_train_toy(args: argparse.Namespace, cfg: Settings) -> int:
    scene = scene_from_args(args)
    config = BlockConfig(
        subspace=SubspaceSpec.parse(args.subspace or cfg.subspace), dim=args.dim, heads=args.heads or cfg.heads,
        aligned=not args.unaligned, shifted=args.shifted, residual=args.residual,
        beta=args.beta, init_scale=args.init_scale,
    )
    trainer = TrainingService(settings=cfg)
    summary, params = trainer.toy_train(scene, config, args.steps, args.lr, cfg.seed)
    comparison = None
    if args.compare:
        seeds = list(range(cfg.seed, cfg.seed + args.compare))
        comparison = trainer.compare_alignment(scene, config, seeds, args.steps, args.lr)
        logger.info(f"Aligned block won {comparison.aligned_wins} of {len(seeds)} seeds")
    ParamsRepository(config.heads).save(params, out_path(cfg, None, "train-params.lvt"))
    metadata = MetricsService.metadata(
        "train-toy", cfg.seed, cfg.precision,
        (scene.frames, scene.height, scene.width, scene.channels), config.subspace,
    )
    result = RunResult(kind="train", run="train-toy", metadata=metadata, train=summary, comparison=comparison)
    write_result(cfg, result, args.out, "train.json")
    return 0


def cmd_sweep(args: argparse.Namespace, cfg: Settings) -> int:
    scene = scene_from_args(args)
    sizes = [SubspaceSpec.parse(s) for s in args.sizes] if args.sizes else list(DEFAULT_SIZES)
    rows = SweepService(settings=cfg).sweep_subspace_sizes(sizes, scene, cfg.seed, args.dim, args.workers)
    TableRepository().save_sweep(rows, out_path(cfg, args.csv, "sweep.csv"))
    metadata = MetricsService.metadata(
        "sweep", cfg.seed, cfg.precision, (scene.frames, scene.height, scene.width, scene.channels),
    )
    write_result(cfg, RunResult(kind="sweep", run="sweep", metadata=metadata, sweep=rows), args.out, "sweep.json")
    return 0


def cmd_report(args: argparse.Namespace, cfg: Settings) -> int:
    service = ReportService()
    results = service.collect(args.inputs or [cfg.out_dir])
    service.report(results, args.report_dir or cfg.out_dir)
    return 0


def cmd_serve(args: argparse.Namespace, cfg: Settings) -> int:
    import uvicorn

    uvicorn.run("stsa.main:app", host=args.host or cfg.api_host, port=args.port or cfg.api_port)
    return 0


def add_scene_args(parser: argparse.ArgumentParser, velocity: str) -> None:
    parser.add_argument("--scene", type=str, help="SceneSpec JSON file (overrides the object flags)")
    parser.add_argument("--dims", type=str, default="16,16,16,8", help="F,H,W,C (default: 16,16,16,8)")
    parser.add_argument("--velocity", type=str, default=velocity, help=f"Object motion vx,vy (default: {velocity})")
    parser.add_argument("--pattern", choices=["linear", "alternate"], default="alternate",
                        help="Repeat the velocity or flip it every frame (default: alternate)")
    parser.add_argument("--shape", choices=["square", "blob"], default="square")
    parser.add_argument("--object-size", type=int, default=4)


def add_block_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--subspace", type=str, help="Window f,h,w (default: STSA_SUBSPACE)")
    parser.add_argument("--shifted", action="store_true", help="Apply the half-window shift")
    parser.add_argument("--unaligned", action="store_true", help="Skip flow alignment")
    parser.add_argument("--heads", type=int, help="Attention heads (default: STSA_HEADS)")
    parser.add_argument("--dim", type=int, help="Attention width d (default: channel count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stsa", description="Spatial-temporal subspace attention harness")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, help="Seed for every random draw (default: STSA_SEED)")
    parser.add_argument("--precision", choices=["single", "double"], help="Float precision (default: double)")
    parser.add_argument("--out-dir", type=str, help="Output directory (default: STSA_OUT_DIR)")
    parser.add_argument("--log-level", type=str, help="Logging level (default: INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", help="Generate a synthetic scene with exact flows")
    add_scene_args(gen, "1,0")
    gen.add_argument("--pgm-dir", type=str, help="Also dump channel 0 as a PGM sequence here")
    gen.set_defaults(handler=cmd_gen_data)

    extract = sub.add_parser("extract-flow", help="Synthesize dense flows from pose keypoints")
    extract.add_argument("--poses", type=str, required=True)
    extract.add_argument("--size", type=str, required=True, help="Flow grid HxW")
    extract.add_argument("--sigma", type=float, default=2.0, help="Kernel bandwidth in cells (default: 2.0)")
    extract.add_argument("--downsample", type=int, default=1, help="Downsampling factor (default: 1)")
    extract.add_argument("--out", type=str)
    extract.set_defaults(handler=cmd_extract_flow)

    run = sub.add_parser("run-block", help="Apply one STSA block to an LVT1 tensor")
    run.add_argument("--input", type=str, required=True)
    run.add_argument("--flows", type=str, required=True)
    run.add_argument("--params", type=str, help="LVT1 params file (W_q, W_k, W_v, W_o); random when omitted")
    run.add_argument("--no-residual", action="store_true", help="Do not add the block input back")
    run.add_argument("--dump-maps", type=str, help="Write the alignment maps as JSON here")
    run.add_argument("--out", type=str)
    add_block_args(run)
    run.set_defaults(handler=cmd_run_block)

    bench = sub.add_parser("benchmark", help="Closed-form attention cost of one mode")
    bench.add_argument("--mode", required=True, choices=[
        "subspace", "temporal", "crossframe-first", "crossframe-middle",
        "crossframe-previous", "crossframe-all", "full",
    ])
    bench.add_argument("--dims", type=str, required=True, help="F,H,W,C,d")
    bench.add_argument("--subspace", type=str)
    bench.add_argument("--heads", type=int)
    bench.add_argument("--verify", action="store_true", help="Check against an instrumented run")
    bench.add_argument("--out", type=str)
    bench.set_defaults(handler=cmd_benchmark)

    train = sub.add_parser("train-toy", help="Train one block to denoise a synthetic scene")
    add_scene_args(train, "4,0")
    add_block_args(train)
    train.add_argument("--steps", type=int, default=200)
    train.add_argument("--lr", type=float, default=0.05)
    train.add_argument("--beta", type=float, default=0.1, help="Forward-noise variance (default: 0.1)")
    train.add_argument("--init-scale", type=float, default=0.1)
    train.add_argument("--residual", action="store_true", help="Add the block input back")
    train.add_argument("--compare", type=int, default=0, help="Also run N paired aligned/unaligned seeds")
    train.add_argument("--out", type=str)
    train.set_defaults(handler=cmd_train_toy)

    sweep = sub.add_parser("sweep", help="Cost and consistency across subspace sizes")
    add_scene_args(sweep, "4,0")
    sweep.add_argument("--sizes", nargs="+", help="Sizes f,h,w (default: 4,2,2 4,4,4 8,4,4)")
    sweep.add_argument("--dim", type=int)
    sweep.add_argument("--workers", type=int, help="Parallel runs (default: STSA_SWEEP_WORKERS)")
    sweep.add_argument("--csv", type=str)
    sweep.add_argument("--out", type=str)
    sweep.set_defaults(handler=cmd_sweep)

    report = sub.add_parser("report", help="Aggregate result files into report.json/csv")
    report.add_argument("inputs", nargs="*", help="Result files or directories (default: --out-dir)")
    report.add_argument("--report-dir", type=str)
    report.set_defaults(handler=cmd_report)

    serve = sub.add_parser("serve", help="Run the HTTP API")
    serve.add_argument("--host", type=str)
    serve.add_argument("--port", type=int)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = override_settings(
            settings, seed=args.seed, precision=args.precision,
            out_dir=args.out_dir, log_level=args.log_level,
        )
        configure_logging(cfg.log_level)
        return args.handler(args, cfg)
    except StsaError as e:
        logger.error(f"{e.code}: {e.detail}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
