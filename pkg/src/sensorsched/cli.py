import argparse
import pathlib
import sys
from typing import Any, Callable

import numpy as np
import pandas as pd
from pydantic import ValidationError

from sensorsched import config, loggingconfig, seeding
from sensorsched.models.events import ClassCatalog, EventTrace
from sensorsched.models.openworld import EVMParams
from sensorsched.models.scheduling import QTable, RewardWeights, TrainConfig, TrainMode
from sensorsched.openworld.evm import evm_fit
from sensorsched.openworld.features import extract_many, features_frame
from sensorsched.openworld.pipeline import (
    OpenWorldConfig,
    known_training_set,
    results_frame,
    run_open_world,
)
from sensorsched.sched.clpa import build_clpa_assignment, min_interval_assign
from sensorsched.sched.policies import (
    ClassPeriodPolicy,
    FixedPeriodPolicy,
    QLearningPolicy,
    SchedulingPolicy,
)
from sensorsched.sched.qlearning import qlbs_train
from sensorsched.sim.comparison import (
    compare_policies,
    decisions_frame,
    metrics_frame,
    transitions_frame,
)
from sensorsched.sim.simulator import Classifier, OpenWorldClassifier, OracleClassifier, run_sim
from sensorsched.storage.csvstore import CsvStore
from sensorsched.storage.modelfile import write_model
from sensorsched.storage.qtablefile import read_qtable, write_qtable
from sensorsched.storage.tracefile import load_trace, save_trace
from sensorsched.trace.generator import (
    DEFAULT_CL_S,
    PROFILES,
    apply_overrides,
    generate_trace,
    get_profiles,
    intervals_by_class,
)
from sensorsched.trace.windows import DEFAULT_WINDOW, synthesize_class_window
from sensorsched.updater.costmodel import TrainCostModel
from sensorsched.updater.experiment import UpdateExperimentConfig, run_update_experiment

logger = loggingconfig.get_logger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2

Command = Callable[[config.RunConfig, CsvStore], list[pathlib.Path]]


def _trace_and_catalog(rc: config.RunConfig) -> tuple[EventTrace, ClassCatalog]:
    profiles = apply_overrides(get_profiles(rc.profile), rc.profile_overrides)
    catalog = ClassCatalog.from_profiles(profiles)
    if rc.trace is None:
        return generate_trace(rc.seed, rc.length, profiles), catalog

    trace = load_trace(rc.trace)
    if trace.num_classes > catalog.num_classes:
        logger.info(f"Imported trace has {trace.num_classes} classes; using CL_s={DEFAULT_CL_S}")
        catalog = ClassCatalog(
            names=[f"class {i}" for i in range(trace.num_classes)],
            cl_s=[DEFAULT_CL_S] * trace.num_classes,
        )
    return EventTrace(classes=trace.classes, num_classes=catalog.num_classes), catalog


def _train_config(rc: config.RunConfig) -> TrainConfig:
    return TrainConfig(
        n_episodes=rc.episodes,
        epsilon=rc.epsilon,
        alpha=rc.alpha,
        gamma=rc.gamma,
        theta=rc.theta,
        n_success=rc.n_success,
        mode=TrainMode(rc.mode),
    )


def _train_table(
    rc: config.RunConfig, trace: EventTrace, catalog: ClassCatalog
) -> tuple[QTable, list[float]]:
    old = read_qtable(rc.qtable) if rc.qtable is not None else None
    result = qlbs_train(
        trace,
        catalog,
        _train_config(rc),
        RewardWeights.from_criteria(rc.cr1, rc.cr2),
        seeding.rng_for(rc.seed, seeding.QLEARNING),
        old_table=old,
        a_max=old.a_max if old is not None else rc.a_max,
    )
    return result.table, result.curve


def _qlbs_table(rc: config.RunConfig, trace: EventTrace, catalog: ClassCatalog) -> QTable:
    """A given Q-table is used as is unless --mode update asks to keep training it."""
    if rc.qtable is not None and rc.mode == "full":
        return read_qtable(rc.qtable)
    return _train_table(rc, trace, catalog)[0]


def _evm_params(rc: config.RunConfig) -> EVMParams:
    return EVMParams(
        tail_size=rc.tail_size,
        cover_threshold=rc.cover_threshold,
        distance_multiplier=rc.distance_multiplier,
        rejection_threshold=rc.rejection_threshold,
    )


def _classifier(rc: config.RunConfig, catalog: ClassCatalog) -> Classifier:
    if rc.classifier == "oracle":
        return OracleClassifier()
    features = extract_many(
        [
            synthesize_class_window(c, 100_000 + i, rc.seed, DEFAULT_WINDOW)
            for c in range(catalog.num_classes)
            for i in range(rc.train_per_class)
        ]
    )
    labels = np.repeat(np.arange(catalog.num_classes), rc.train_per_class)
    return OpenWorldClassifier(evm_fit(features, labels, _evm_params(rc)), rc.seed)


def _build_policies(
    names: list[str], rc: config.RunConfig, trace: EventTrace, catalog: ClassCatalog
) -> tuple[list[SchedulingPolicy], pd.DataFrame | None]:
    policies: list[SchedulingPolicy] = []
    assignments = []
    intervals = intervals_by_class(trace)
    for name in names:
        if name == "fixed":
            policies.append(FixedPeriodPolicy(rc.fixed_period))
        elif name == "min":
            assignment = min_interval_assign(intervals)
            assignments.append(assignment.to_frame().assign(policy="min"))
            policies.append(ClassPeriodPolicy(assignment, "min"))
        elif name == "clpa":
            assignment = build_clpa_assignment(intervals, catalog)
            assignments.append(assignment.to_frame().assign(policy="clpa"))
            policies.append(ClassPeriodPolicy(assignment, "clpa"))
        elif name == "qlbs":
            policies.append(QLearningPolicy(_qlbs_table(rc, trace, catalog)))
        else:
            raise ValueError(f"unknown policy {name!r}")
    frame = pd.concat(assignments, ignore_index=True) if assignments else None
    return policies, frame


def cmd_gen_trace(rc: config.RunConfig, store: CsvStore) -> list[pathlib.Path]:
    trace, _ = _trace_and_catalog(rc)
    path = store.path("trace")
    save_trace(path, trace)
    return [path]


def cmd_train_qlbs(rc: config.RunConfig, store: CsvStore) -> list[pathlib.Path]:
    trace, catalog = _trace_and_catalog(rc)
    table, curve = _train_table(rc, trace, catalog)
    table_path = store.path("qtable", "txt")
    write_qtable(table_path, table)
    curve_frame = pd.DataFrame({"episode": np.arange(1, len(curve) + 1), "avg_penalty": curve})
    return [table_path, store.write("training_curve", curve_frame)]


def cmd_simulate(rc: config.RunConfig, store: CsvStore) -> list[pathlib.Path]:
    trace, catalog = _trace_and_catalog(rc)
    (policy,), assignment = _build_policies([rc.policy], rc, trace, catalog)
    result = run_sim(trace, policy, catalog, _classifier(rc, catalog))
    written = [
        store.write("metrics", metrics_frame([result.metrics])),
        store.write("transitions", transitions_frame(result.metrics)),
        store.write("decisions", decisions_frame(result.decisions)),
    ]
    if assignment is not None:
        written.append(store.write("assignment", assignment.drop(columns="policy")))
    return written


def cmd_compare(rc: config.RunConfig, store: CsvStore) -> list[pathlib.Path]:
    trace, catalog = _trace_and_catalog(rc)
    policies, assignments = _build_policies(rc.policies, rc, trace, catalog)
    results = compare_policies(trace, policies, catalog, _classifier(rc, catalog), jobs=rc.jobs)
    written = [store.write("comparison", metrics_frame(results))]
    for metrics in results:
        written.append(store.write(f"transitions_{metrics.policy}", transitions_frame(metrics)))
    if assignments is not None:
        written.append(store.write("assignment", assignments))
    return written


def cmd_openworld(rc: config.RunConfig, store: CsvStore) -> list[pathlib.Path]:
    cfg = OpenWorldConfig(
        n_known=rc.n_known,
        n_increments=rc.n_increments,
        per_increment=rc.per_increment,
        dim=rc.dim,
        train_per_class=rc.train_per_class,
        test_per_class=rc.test_per_class,
        min_samples=rc.min_samples,
    )
    train_x, train_y = known_training_set(rc.seed, cfg)
    results = run_open_world(rc.seed, cfg, _evm_params(rc))
    return [
        store.write("features", features_frame(train_x, train_y)),
        store.write("owm", results_frame(results)),
    ]


def cmd_update_exp(rc: config.RunConfig, store: CsvStore) -> list[pathlib.Path]:
    trace, catalog = _trace_and_catalog(rc)
    cfg = UpdateExperimentConfig(
        novel_class=rc.novel_class,
        queue_size=rc.queue_size,
        period_overrides=rc.period_overrides,
        calibrate=rc.calibrate,
    )
    result = run_update_experiment(
        rc.seed,
        trace,
        catalog,
        TrainCostModel.linear(rc.seconds_per_sample),
        cfg,
        _evm_params(rc),
    )
    if not result.drained:
        logger.warning("Update queue was not drained within the trace")
    model_path = store.path("model", "txt")
    write_model(model_path, result.model)
    return [
        store.write("update_log", result.log),
        store.write("metrics", metrics_frame([result.sim.metrics])),
        model_path,
    ]


COMMANDS: dict[str, Command] = {
    "gen-trace": cmd_gen_trace,
    "train-qlbs": cmd_train_qlbs,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "openworld": cmd_openworld,
    "update-exp": cmd_update_exp,
}


def _common_parser(suppress: bool) -> argparse.ArgumentParser:
    # Subcommands take the global flags too; SUPPRESS keeps them from resetting earlier values.
    default = argparse.SUPPRESS if suppress else None
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=pathlib.Path, default=default, help="key=value file")
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--out", type=pathlib.Path, default=default, help="output directory")
    parser.add_argument("-e", "--env", type=str, default=default, help="path to the .env file")
    if suppress:
        parser.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    return parser


def _add_trace_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--length", type=int, help="trace length in seconds")
    parser.add_argument("--profile", choices=PROFILES)
    parser.add_argument("--trace", type=pathlib.Path, help="t,class_id CSV to use")


def _add_training_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--n-success", dest="n_success", type=int)
    parser.add_argument("--mode", choices=["full", "update"])
    parser.add_argument("--a-max", dest="a_max", type=int)
    parser.add_argument("--cr1", help="Cr1 reward/penalty, e.g. 10/50")
    parser.add_argument("--cr2", help="Cr2 reward/penalty, e.g. 1/5")
    parser.add_argument("--qtable", type=pathlib.Path, help="existing Q-table file")


def _add_sim_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fixed-period", dest="fixed_period", type=int)
    parser.add_argument("--classifier", choices=["oracle", "openworld"])


def _add_evm_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tail-size", dest="tail_size", type=int)
    parser.add_argument("--cover-threshold", dest="cover_threshold", type=float)
    parser.add_argument("--distance-multiplier", dest="distance_multiplier", type=float)
    parser.add_argument("--rejection-threshold", dest="rejection_threshold", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensorsched",
        description="Sensor scheduling and open-world classification experiments",
        parents=[loggingconfig.parser, _common_parser(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser(suppress=True)

    gen = sub.add_parser("gen-trace", parents=[common], help="generate an event trace")
    _add_trace_args(gen)

    train = sub.add_parser("train-qlbs", parents=[common], help="train a Q-learning scheduler")
    _add_trace_args(train)
    _add_training_args(train)

    simulate = sub.add_parser("simulate", parents=[common], help="simulate one policy")
    _add_trace_args(simulate)
    _add_training_args(simulate)
    _add_sim_args(simulate)
    _add_evm_args(simulate)
    simulate.add_argument("--policy", choices=["fixed", "clpa", "qlbs", "min"])

    compare = sub.add_parser("compare", parents=[common], help="compare policies on one trace")
    _add_trace_args(compare)
    _add_training_args(compare)
    _add_sim_args(compare)
    _add_evm_args(compare)
    compare.add_argument("--policies", help="comma separated, e.g. fixed,clpa,qlbs,min")
    compare.add_argument("--jobs", type=int, help="worker processes")

    openworld = sub.add_parser("openworld", parents=[common], help="incremental open-world run")
    _add_evm_args(openworld)
    openworld.add_argument("--min-samples", dest="min_samples", type=int)
    openworld.add_argument("--n-known", dest="n_known", type=int)
    openworld.add_argument("--n-increments", dest="n_increments", type=int)
    openworld.add_argument("--per-increment", dest="per_increment", type=int)
    openworld.add_argument("--dim", type=int)

    update = sub.add_parser("update-exp", parents=[common], help="model updater case study")
    _add_trace_args(update)
    _add_evm_args(update)
    update.add_argument("--queue-size", dest="queue_size", type=int)
    update.add_argument("--seconds-per-sample", dest="seconds_per_sample", type=float)
    update.add_argument("--novel-class", dest="novel_class", type=int)
    update.add_argument(
        "--period-override",
        dest="period_overrides",
        action="append",
        help="class=T_sp, repeatable",
    )
    update.add_argument("--calibrate", action="store_true", default=None)
    return parser


_NOT_CONFIG = {"command", "config", "verbose", "env"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    loggingconfig.set_verbosity(args.verbose)

    overrides: dict[str, Any] = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        rc = config.load_run_config(args.config, overrides)
    except (ValidationError, ValueError, FileNotFoundError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    try:
        store = CsvStore(rc.output_dir)
        written = COMMANDS[args.command](rc, store)
    except (ValidationError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"{args.command} could not write its output: {e}")
        return EXIT_IO

    for path in written:
        logger.info(f"Wrote {path}")
    return EXIT_OK


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
