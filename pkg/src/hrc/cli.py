"""``hrc`` command line: serve, replay, eval, enumerate, robot.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import yaml

from .assistant import AssistantUnavailableError, LlmAssistant, LlmConfig, RuleAssistant
from .dialogue import DialogueSession
from .harness import (
    CorpusError,
    eval_corpus,
    load_corpus_file,
    parse_steps,
    run_script,
    word_count_metrics,
)
from .robot import RobotServer, RobotSimulator
from .scene import SceneError, load_scene_file
from .service import ServiceConfig, ServiceConfigError, create_app
from .validation import verdict_table_csv

DEFAULT_SCENE = "scenes/drywall_fig9.json"


class RuntimeFailure(click.ClickException):
    exit_code = 2


def _load_scene(path: str):
    try:
        return load_scene_file(path)
    except OSError as exc:
        raise RuntimeFailure(f"cannot read scene file: {exc}") from exc
    except SceneError as exc:
        raise RuntimeFailure(f"bad scene file {path}: {exc}") from exc


def _make_assistant_factory(mode: str):
    if mode == "rule":
        return lambda scene: RuleAssistant()
    try:
        config = LlmConfig.from_env()
    except AssistantUnavailableError as exc:
        raise RuntimeFailure(str(exc)) from exc
    return lambda scene: LlmAssistant(scene, config=config)


@click.group()
def cli() -> None:
    """Human-robot collaboration orchestrator."""


@cli.command()
@click.option("--scene", default=DEFAULT_SCENE, show_default=True, help="Scene JSON file.")
@click.option(
    "--assistant",
    type=click.Choice(["rule", "llm"]),
    default="rule",
    show_default=True,
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option(
    "--phase-delay",
    default=0.4,
    show_default=True,
    help="Seconds between robot phases (0 runs tasks inline).",
)
@click.option(
    "--ui",
    "ui_dir",
    default="frontend/dist",
    show_default=True,
    help="Operator UI bundle directory (served under /ui when present).",
)
def serve(scene: str, assistant: str, host: str, port: int, phase_delay: float, ui_dir: str):
    """Host the session service."""
    import uvicorn

    try:
        app = create_app(
            ServiceConfig(
                scene_path=scene,
                assistant_mode=assistant,
                phase_delay=phase_delay,
                ui_dir=ui_dir,
            )
        )
    except (ServiceConfigError, SceneError, OSError) as exc:
        raise RuntimeFailure(str(exc)) from exc
    uvicorn.run(app, host=host, port=port)


@cli.command()
@click.argument("script_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--scene", default=None, help="Override the script's scene file.")
@click.option("--assistant", type=click.Choice(["rule", "llm"]), default=None)
def replay(script_file: str, scene: str | None, assistant: str | None):
    """Replay a scripted session (YAML: scene, assistant, steps)."""
    try:
        data = yaml.safe_load(Path(script_file).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise RuntimeFailure(f"bad script file: {exc}") from exc
    if not isinstance(data, dict) or "steps" not in data:
        raise RuntimeFailure("script file must be a map with a 'steps' list")
    scene_path = scene or data.get("scene") or DEFAULT_SCENE
    mode = assistant or data.get("assistant") or "rule"
    if mode not in ("rule", "llm"):
        raise RuntimeFailure(f"unknown assistant mode {mode!r}")
    loaded = _load_scene(scene_path)
    try:
        steps = parse_steps(data["steps"])
    except CorpusError as exc:
        raise RuntimeFailure(str(exc)) from exc

    session = DialogueSession(loaded, _make_assistant_factory(mode)(loaded))
    try:
        run = run_script(session, steps, simulator=RobotSimulator())
    except AssistantUnavailableError as exc:
        raise RuntimeFailure(str(exc)) from exc
    for entry in session.transcript:
        click.echo(f"[{entry.speaker}] {entry.text}")
    for error in run.errors:
        click.echo(f"[error] {error}")
    counts, mean = word_count_metrics(session.transcript)
    if counts:
        click.echo(f"user commands: {len(counts)}, words per command: "
                   f"{counts} (mean {mean:.2f})")
    installed = [p for p in session.scene.panels() if p.installed_on is not None]
    click.echo(
        "installed: "
        + (", ".join(f"{p.id}->{p.installed_on}" for p in installed) or "none")
    )


@cli.command("eval")
@click.option(
    "--corpus",
    default="corpora/incorrect_instructions.yaml",
    show_default=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--scene", default=DEFAULT_SCENE, show_default=True)
@click.option(
    "--assistant",
    type=click.Choice(["rule", "llm"]),
    default="rule",
    show_default=True,
)
def eval_command(corpus: str, scene: str, assistant: str):
    """Score incorrect-instruction detection over a corpus."""
    loaded = _load_scene(scene)
    try:
        corpus_data = load_corpus_file(corpus)
        report = eval_corpus(corpus_data, loaded, _make_assistant_factory(assistant))
    except CorpusError as exc:
        raise RuntimeFailure(str(exc)) from exc
    except AssistantUnavailableError as exc:
        raise RuntimeFailure(str(exc)) from exc
    click.echo(report.to_text())


@cli.command()
@click.option("--scene", default=DEFAULT_SCENE, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def enumerate(scene: str, out: str | None):
    """Export the exhaustive (panel, stud) verdict table as CSV."""
    csv_text = verdict_table_csv(_load_scene(scene))
    if out:
        Path(out).write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(csv_text, nl=False)


@cli.command()
@click.option("--listen", default="127.0.0.1:9090", show_default=True)
@click.option("--phase-delay", default=0.0, show_default=True)
@click.option("--inject-fault", is_flag=True, default=False)
def robot(listen: str, phase_delay: float, inject_fault: bool):
    """Run the robot simulator standalone on a TCP socket."""
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.UsageError(f"--listen must be host:port, got {listen!r}")
    simulator = RobotSimulator(phase_delay=phase_delay, inject_fault=inject_fault)
    try:
        server = RobotServer((host, int(port_text)), simulator)
    except OSError as exc:
        raise RuntimeFailure(f"cannot bind {listen}: {exc}") from exc
    click.echo(f"robot simulator listening on {listen}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
