"""Match execution: one base-game match between two programs, plus the
round-robin tournament used for payoff-matrix estimation.

Both programs are evaluated each round against bindings built from the
pre-round state (so neither action can depend on the other's same-round
action) including the opponent's complete current source.  A runtime fault
never aborts a match: the configured fallback action is substituted and the
fault is logged in the record.  Everything is deterministic given the
config seed; per-player, per-round rng streams are derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import games
from .program import ProgramError, StrategyProgram
from .rng import RNG_ALGORITHM, SplitMix64, derive_seed
from .runtime import Bindings, Budget, CoinView, RuntimeFault, evaluate
from .slang.validator import GAME_COIN, GAME_IPD, GAMES, validate

SCHEMA_MATCH = "osgames.match/1"

DEFAULT_FALLBACK = {GAME_IPD: "D", GAME_COIN: "UP"}

PLAYER_IDS = ("A", "B")


@dataclass(frozen=True)
class MatchConfig:
    game: str = GAME_IPD
    rounds: int = 10  # base-game rounds (steps, for the coin game)
    payoffs: games.PayoffParams = field(default_factory=games.PayoffParams)
    budget: Budget = field(default_factory=Budget)
    fallback: str | None = None  # substituted on faults; None = game default
    seed: int = 0
    board_size: int = 3  # coin game only

    def __post_init__(self):
        if self.game not in GAMES:
            raise ValueError(f"unknown game kind {self.game!r}")
        if self.rounds <= 0:
            raise ValueError("rounds must be positive")
        legal = games.IPD_ACTIONS if self.game == GAME_IPD else games.MOVES
        if self.fallback is not None and self.fallback not in legal:
            raise ValueError(f"fallback {self.fallback!r} is not legal for {self.game}")

    @property
    def fallback_action(self) -> str:
        return self.fallback if self.fallback is not None else DEFAULT_FALLBACK[self.game]

    def to_json_dict(self) -> dict:
        d = {
            "game": self.game,
            "rounds": self.rounds,
            "seed": self.seed,
            "fallback": self.fallback_action,
            "budget": {
                "step_limit": self.budget.step_limit,
                "call_depth_limit": self.budget.call_depth_limit,
                "list_length_cap": self.budget.list_length_cap,
            },
        }
        if self.game == GAME_IPD:
            p = self.payoffs
            d["payoffs"] = {"T": p.t, "R": p.r, "P": p.p, "S": p.s}
        else:
            d["board_size"] = self.board_size
        return d


@dataclass(frozen=True)
class FaultRecord:
    player: str
    round: int
    kind: str
    span: tuple[int, int]
    detail: str

    def to_json_dict(self) -> dict:
        return {
            "player": self.player,
            "round": self.round,
            "kind": self.kind,
            "span": list(self.span),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class MatchRecord:
    config: MatchConfig
    sources: tuple[str, str]
    origins: tuple[str, str]
    actions: tuple[tuple[str, str], ...]  # per round, (A, B)
    deltas: tuple[tuple[int, int], ...]
    totals: tuple[int, int]
    faults: tuple[FaultRecord, ...]
    initial_state: games.CoinState | None = None
    events: tuple[tuple[games.CoinEvent, ...], ...] = ()  # per step (coin only)

    def player_actions(self, player: str) -> tuple[str, ...]:
        idx = PLAYER_IDS.index(player)
        return tuple(turn[idx] for turn in self.actions)

    def player_faults(self, player: str) -> tuple[FaultRecord, ...]:
        return tuple(f for f in self.faults if f.player == player)

    def to_json_dict(self) -> dict:
        turns = []
        for r, (acts, ds) in enumerate(zip(self.actions, self.deltas)):
            turn = {"round": r, "actions": list(acts), "deltas": list(ds)}
            if self.config.game == GAME_COIN:
                turn["events"] = [
                    {
                        "collector": e.collector,
                        "color": e.color,
                        "cell": list(e.cell),
                        "step": e.step,
                    }
                    for e in self.events[r]
                ]
            turns.append(turn)
        record = {
            "schema": SCHEMA_MATCH,
            "rng_algorithm": RNG_ALGORITHM,
            "config": self.config.to_json_dict(),
            "players": [
                {"id": pid, "origin": origin, "source": source}
                for pid, origin, source in zip(PLAYER_IDS, self.origins, self.sources)
            ],
            "turns": turns,
            "totals": list(self.totals),
            "faults": [f.to_json_dict() for f in self.faults],
        }
        if self.initial_state is not None:
            s = self.initial_state
            record["initial_state"] = {
                "n": s.n,
                "pos_a": list(s.pos_a),
                "pos_b": list(s.pos_b),
                "coin_red": list(s.coin_red),
                "coin_blue": list(s.coin_blue),
            }
        return record


class ArenaError(Exception):
    pass


def _require_valid(program: StrategyProgram, game: str, who: str) -> None:
    report = validate(program.tree, game)
    if not report.ok:
        messages = "; ".join(d.message for d in report.errors())
        raise ProgramError(f"player {who} does not validate for {game}: {messages}")


def _eval_round(
    program: StrategyProgram,
    env: Bindings,
    cfg: MatchConfig,
    player: str,
    round_index: int,
) -> tuple[str, FaultRecord | None]:
    rng = SplitMix64(derive_seed(cfg.seed, "eval", player, round_index))
    try:
        value, _ = evaluate(program.tree, env, cfg.budget, rng)
        return value, None
    except RuntimeFault as fault:
        record = FaultRecord(
            player,
            round_index,
            fault.kind.value,
            (fault.span.start, fault.span.end),
            fault.detail,
        )
        return cfg.fallback_action, record


def play_match(
    pa: StrategyProgram, pb: StrategyProgram, cfg: MatchConfig = MatchConfig()
) -> MatchRecord:
    """Run one full match; faults become fallback actions plus log entries."""
    _require_valid(pa, cfg.game, "A")
    _require_valid(pb, cfg.game, "B")
    if cfg.game == GAME_IPD:
        return _play_ipd(pa, pb, cfg)
    return _play_coin(pa, pb, cfg)


def _play_ipd(pa, pb, cfg) -> MatchRecord:
    hist_a: list[str] = []
    hist_b: list[str] = []
    actions: list[tuple[str, str]] = []
    deltas: list[tuple[int, int]] = []
    faults: list[FaultRecord] = []
    for r in range(cfg.rounds):
        env_a = Bindings(
            game=GAME_IPD,
            my_history=tuple(hist_a),
            opp_history=tuple(hist_b),
            my_source=pa.text,
            opp_source=pb.text,
            round_index=r,
        )
        env_b = Bindings(
            game=GAME_IPD,
            my_history=tuple(hist_b),
            opp_history=tuple(hist_a),
            my_source=pb.text,
            opp_source=pa.text,
            round_index=r,
        )
        act_a, fault_a = _eval_round(pa, env_a, cfg, "A", r)
        act_b, fault_b = _eval_round(pb, env_b, cfg, "B", r)
        faults.extend(f for f in (fault_a, fault_b) if f is not None)
        da, db = games.ipd_payoff(act_a, act_b, cfg.payoffs)
        hist_a.append(act_a)
        hist_b.append(act_b)
        actions.append((act_a, act_b))
        deltas.append((da, db))
    totals = (sum(d[0] for d in deltas), sum(d[1] for d in deltas))
    return MatchRecord(
        cfg,
        (pa.text, pb.text),
        (pa.origin, pb.origin),
        tuple(actions),
        tuple(deltas),
        totals,
        tuple(faults),
    )


def _play_coin(pa, pb, cfg) -> MatchRecord:
    state = games.initial_coin_state(
        cfg.board_size, SplitMix64(derive_seed(cfg.seed, "init"))
    )
    initial = state
    hist_a: list[str] = []
    hist_b: list[str] = []
    actions: list[tuple[str, str]] = []
    deltas: list[tuple[int, int]] = []
    events: list[tuple[games.CoinEvent, ...]] = []
    faults: list[FaultRecord] = []
    for step in range(cfg.rounds):
        view_a = CoinView(state.pos_a, state.pos_b, state.coin_red, state.coin_blue, state.n)
        view_b = CoinView(state.pos_b, state.pos_a, state.coin_blue, state.coin_red, state.n)
        env_a = Bindings(
            game=GAME_COIN,
            my_history=tuple(hist_a),
            opp_history=tuple(hist_b),
            my_source=pa.text,
            opp_source=pb.text,
            round_index=step,
            coin_view=view_a,
        )
        env_b = Bindings(
            game=GAME_COIN,
            my_history=tuple(hist_b),
            opp_history=tuple(hist_a),
            my_source=pb.text,
            opp_source=pa.text,
            round_index=step,
            coin_view=view_b,
        )
        move_a, fault_a = _eval_round(pa, env_a, cfg, "A", step)
        move_b, fault_b = _eval_round(pb, env_b, cfg, "B", step)
        faults.extend(f for f in (fault_a, fault_b) if f is not None)
        env_rng = SplitMix64(derive_seed(cfg.seed, "env", step))
        state, da, db, step_events = games.coin_step(state, move_a, move_b, env_rng)
        hist_a.append(move_a)
        hist_b.append(move_b)
        actions.append((move_a, move_b))
        deltas.append((da, db))
        events.append(tuple(step_events))
    totals = (sum(d[0] for d in deltas), sum(d[1] for d in deltas))
    return MatchRecord(
        cfg,
        (pa.text, pb.text),
        (pa.origin, pb.origin),
        tuple(actions),
        tuple(deltas),
        totals,
        tuple(faults),
        initial_state=initial,
        events=tuple(events),
    )


def replay(record_dict: dict) -> MatchRecord:
    """Re-run the configuration stored in a match record dict."""
    if record_dict.get("schema") != SCHEMA_MATCH:
        raise ArenaError(f"not a match record: {record_dict.get('schema')!r}")
    if record_dict.get("rng_algorithm") != RNG_ALGORITHM:
        raise ArenaError("record was produced with a different rng algorithm")
    cfg_d = record_dict["config"]
    kwargs = {
        "game": cfg_d["game"],
        "rounds": cfg_d["rounds"],
        "seed": cfg_d["seed"],
        "fallback": cfg_d["fallback"],
        "budget": Budget(**cfg_d["budget"]),
    }
    if "payoffs" in cfg_d:
        p = cfg_d["payoffs"]
        kwargs["payoffs"] = games.PayoffParams(p["T"], p["R"], p["P"], p["S"])
    if "board_size" in cfg_d:
        kwargs["board_size"] = cfg_d["board_size"]
    cfg = MatchConfig(**kwargs)
    from .program import load_program

    players = record_dict["players"]
    pa = load_program(players[0]["source"], origin=players[0]["origin"], game=cfg.game)
    pb = load_program(players[1]["source"], origin=players[1]["origin"], game=cfg.game)
    return play_match(pa, pb, cfg)


# --------------------------------------------------------------------------
# round robin


@dataclass(frozen=True)
class RoundRobinTable:
    """Mean payoff of the row type against the column type."""

    tags: tuple[str, ...]
    means: tuple[tuple[float, ...], ...]
    samples: dict[tuple[int, int], tuple[tuple[int, int], ...]]  # (seed, payoff)

    def to_json_dict(self) -> dict:
        return {
            "schema": "osgames.tournament/1",
            "tags": list(self.tags),
            "means": [list(row) for row in self.means],
            "samples": {
                f"{i},{j}": [[seed, payoff] for seed, payoff in cell]
                for (i, j), cell in sorted(self.samples.items())
            },
        }


def _pair_job(args) -> tuple[int, int, tuple[tuple[int, int], ...]]:
    """One ordered pairing's matches (top level so worker pools can run it)."""
    i, j, source_i, source_j, cfg, seeds = args
    from .program import load_program

    pi = load_program(source_i, game=cfg.game)
    pj = load_program(source_j, game=cfg.game)
    cell = []
    for seed in seeds:
        record = play_match(pi, pj, replace(cfg, seed=seed))
        cell.append((seed, record.totals[0]))
    return i, j, tuple(cell)


def round_robin(
    entries: list[tuple[str, StrategyProgram]],
    cfg: MatchConfig = MatchConfig(),
    repetitions: int = 1,
    jobs: int = 1,
) -> RoundRobinTable:
    """Play every ordered pair (self-play included) `repetitions` times.

    Each pairing/repetition gets its own seed derived from cfg.seed, so the
    table is identical however the pairings are scheduled; jobs > 1 spreads
    the independent pairings over a process pool.
    """
    if len(entries) < 2:
        raise ArenaError("round robin needs at least two types")
    if repetitions < 1:
        raise ArenaError("repetitions must be at least 1")
    tags = tuple(tag for tag, _ in entries)
    programs = [program for _, program in entries]
    for tag, program in entries:
        _require_valid(program, cfg.game, tag)
    n = len(programs)
    tasks = []
    for i in range(n):
        for j in range(n):
            seeds = [derive_seed(cfg.seed, "pair", i, j, rep) for rep in range(repetitions)]
            tasks.append((i, j, programs[i].text, programs[j].text, cfg, seeds))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pair_job, tasks))
    else:
        results = [_pair_job(t) for t in tasks]
    samples: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
    for i, j, cell in results:
        samples[(i, j)] = cell
    means = tuple(
        tuple(
            sum(p for _, p in samples[(i, j)]) / len(samples[(i, j)])
            for j in range(n)
        )
        for i in range(n)
    )
    return RoundRobinTable(tags, means, samples)
