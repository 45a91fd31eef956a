""" Grid skirmish: allied agents against scripted enemies
    License: MIT
"""

from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np

from mgan.envs.base import CoopEnv, EnvSpec
from mgan.exceptions import InitializationError

NO_OP = 0
STOP = 1
MOVES = ((0, 1), (0, -1), (1, 0), (-1, 0))  # north, south, east, west
ATTACK_OFFSET = 2 + len(MOVES)

KILL_BONUS = 10.0
WIN_BONUS = 200.0

UNIT_FEATURES = 4


@dataclass(frozen=True)
class SkirmishConfig:
    """Board and unit settings of a :class:`SkirmishGrid`"""

    width: int = 6
    height: int = 6
    n_allies: int = 5
    n_enemies: int = 3
    ally_hp: int = 4
    enemy_hp: int = 3
    ally_damage: int = 1
    enemy_damage: int = 1
    attack_range: int = 2
    sight_range: int = 4
    cooldown: int = 0
    horizon: int = 30
    seed: int = 0

    def validate(self) -> None:
        """Raise InitializationError when the board or a unit setting is invalid"""
        ints = asdict(self)
        ints.pop("seed")
        ints.pop("cooldown")
        for key, value in ints.items():
            if int(value) < 1:
                raise InitializationError(f"SkirmishGrid: {key} must be positive; got {value}")
        if self.cooldown < 0:
            raise InitializationError(f"SkirmishGrid: cooldown must be non-negative; got {self.cooldown}")
        if self.width < 4:
            raise InitializationError("SkirmishGrid: width must be at least 4")
        if max(self.n_allies, self.n_enemies) > 2 * self.height:
            raise InitializationError("SkirmishGrid: the board does not fit all units")


def chebyshev(a: Tuple[int, int], b: Tuple[int, int]) -> int:
    """grid distance with diagonal moves counted as one"""
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


class _Unit:
    __slots__ = ("x", "y", "hp", "max_hp", "damage", "cooldown")

    def __init__(self, x: int, y: int, hp: int, damage: int) -> None:
        self.x = x
        self.y = y
        self.hp = hp
        self.max_hp = hp
        self.damage = damage
        self.cooldown = 0

    @property
    def pos(self) -> Tuple[int, int]:
        return (self.x, self.y)

    @property
    def alive(self) -> bool:
        return self.hp > 0


class SkirmishGrid(CoopEnv):
    """Allies (the learning agents) fight enemies that follow a fixed script

    Actions: 0 no-op (dead agents only), 1 stop, 2..5 move north/south/east/west,
    `6 + j` attack enemy j. Attacks need the target within `attack_range` and a ready
    cooldown. Enemies attack the nearest ally in range, else step towards the nearest ally.
    Attacks of one step resolve simultaneously from the positions at the start of the step
    (allies first, then enemies, each in index order); moves follow in the same order.

    The reward is the damage dealt to enemies plus 10 per kill plus 200 for the win,
    divided by the largest possible total so an episode return never exceeds 1.

    Args:
        config (SkirmishConfig): Board and unit settings
    Raises:
        InitializationError: When the configuration is invalid"""

    def __init__(self, config: Optional[SkirmishConfig] = None) -> None:
        cfg = config if config is not None else SkirmishConfig()
        cfg.validate()
        self._cfg = cfg
        n, m = cfg.n_allies, cfg.n_enemies
        super().__init__(
            EnvSpec(
                n_agents=n,
                n_actions=ATTACK_OFFSET + m,
                obs_dim=UNIT_FEATURES * (n + m),
                state_dim=UNIT_FEATURES * (n + m),
                horizon=cfg.horizon,
                success="all enemies dead",
            )
        )
        self._allies: List[_Unit] = []
        self._enemies: List[_Unit] = []
        self._max_return = m * cfg.enemy_hp + KILL_BONUS * m + WIN_BONUS
        self._damage_dealt = 0.0
        self._kills = 0

    @property
    def config(self) -> SkirmishConfig:
        """SkirmishConfig: The settings"""
        return self._cfg

    @property
    def max_return(self) -> float:
        """float: Unnormalized reward of a perfect episode: enemy HP plus every bonus"""
        return self._max_return

    @property
    def damage_dealt(self) -> float:
        """float: Effective damage dealt to enemies in the current episode"""
        return self._damage_dealt

    @property
    def kills(self) -> int:
        """int: Enemies killed in the current episode"""
        return self._kills

    def agent_health(self) -> np.ndarray:
        return np.array([unit.hp / unit.max_hp for unit in self._allies], dtype=np.float64)

    def enemy_health(self) -> np.ndarray:
        """Per-enemy health fraction"""
        return np.array([unit.hp / unit.max_hp for unit in self._enemies], dtype=np.float64)

    def _reset(self, seed: Optional[int]) -> None:
        cfg = self._cfg
        rng = np.random.default_rng(cfg.seed if seed is None else seed)
        self._allies = [
            _Unit(x, y, cfg.ally_hp, cfg.ally_damage) for x, y in self._place(rng, cfg.n_allies, (0, 1))
        ]
        self._enemies = [
            _Unit(x, y, cfg.enemy_hp, cfg.enemy_damage)
            for x, y in self._place(rng, cfg.n_enemies, (cfg.width - 2, cfg.width - 1))
        ]
        self._damage_dealt = 0.0
        self._kills = 0

    def _place(self, rng: np.random.Generator, count: int, columns: Tuple[int, int]) -> List[Tuple[int, int]]:
        cells = [(x, y) for x in columns for y in range(self._cfg.height)]
        picks = rng.choice(len(cells), size=count, replace=False)
        return [cells[int(i)] for i in sorted(picks)]

    def alive(self) -> np.ndarray:
        return np.array([float(unit.alive) for unit in self._allies], dtype=np.float64)

    def avail_actions(self) -> np.ndarray:
        avail = np.zeros((self.spec.n_agents, self.spec.n_actions), dtype=np.float64)
        occupied = self._occupied()
        for i, unit in enumerate(self._allies):
            if not unit.alive:
                avail[i, NO_OP] = 1.0
                continue
            avail[i, STOP] = 1.0
            for k, (dx, dy) in enumerate(MOVES):
                if self._free((unit.x + dx, unit.y + dy), occupied):
                    avail[i, 2 + k] = 1.0
            if unit.cooldown == 0:
                for j, enemy in enumerate(self._enemies):
                    if enemy.alive and chebyshev(unit.pos, enemy.pos) <= self._cfg.attack_range:
                        avail[i, ATTACK_OFFSET + j] = 1.0
        return avail

    def _occupied(self) -> set:
        return {unit.pos for unit in self._allies + self._enemies if unit.alive}

    def _free(self, cell: Tuple[int, int], occupied: set) -> bool:
        x, y = cell
        return 0 <= x < self._cfg.width and 0 <= y < self._cfg.height and cell not in occupied

    def _unit_features(self, unit: _Unit, viewer: _Unit) -> List[float]:
        """visibility, relative position and health of `unit` as seen by `viewer`"""
        sight = self._cfg.sight_range
        if not unit.alive or chebyshev(unit.pos, viewer.pos) > sight:
            return [0.0] * UNIT_FEATURES
        return [1.0, (unit.x - viewer.x) / sight, (unit.y - viewer.y) / sight, unit.hp / unit.max_hp]

    def _own_features(self, unit: _Unit) -> List[float]:
        cfg = self._cfg
        if not unit.alive:
            return [0.0] * UNIT_FEATURES
        ready = unit.cooldown / cfg.cooldown if cfg.cooldown > 0 else 0.0
        return [unit.x / max(cfg.width - 1, 1), unit.y / max(cfg.height - 1, 1), unit.hp / unit.max_hp, ready]

    def observations(self) -> np.ndarray:
        obs = np.zeros((self.spec.n_agents, self.spec.obs_dim), dtype=np.float64)
        for i, me in enumerate(self._allies):
            if not me.alive:
                continue
            feats = self._own_features(me)
            for k, other in enumerate(self._allies):
                if k != i:
                    feats.extend(self._unit_features(other, me))
            for enemy in self._enemies:
                feats.extend(self._unit_features(enemy, me))
            obs[i] = feats
        return obs

    def state(self) -> np.ndarray:
        feats: List[float] = []
        for unit in self._allies + self._enemies:
            feats.extend(self._own_features(unit))
        return np.array(feats, dtype=np.float64)

    def _enemy_script(self) -> List[Tuple[str, int]]:
        """(kind, target) per enemy decided from the positions at the start of the step"""
        plans: List[Tuple[str, int]] = []
        live_allies = [i for i, ally in enumerate(self._allies) if ally.alive]
        for enemy in self._enemies:
            if not enemy.alive or not live_allies:
                plans.append(("stop", -1))
                continue
            nearest = min(live_allies, key=lambda i: (chebyshev(enemy.pos, self._allies[i].pos), i))
            if enemy.cooldown == 0 and chebyshev(enemy.pos, self._allies[nearest].pos) <= self._cfg.attack_range:
                plans.append(("attack", nearest))
            else:
                plans.append(("approach", nearest))
        return plans

    def _approach(self, unit: _Unit, target: _Unit, occupied: set) -> None:
        dx, dy = target.x - unit.x, target.y - unit.y
        steps = [(int(np.sign(dx)), 0), (0, int(np.sign(dy)))]
        if abs(dy) > abs(dx):
            steps.reverse()
        for sx, sy in steps:
            if (sx, sy) == (0, 0):
                continue
            cell = (unit.x + sx, unit.y + sy)
            if self._free(cell, occupied):
                occupied.discard(unit.pos)
                unit.x, unit.y = cell
                occupied.add(cell)
                return

    def _step(self, actions: np.ndarray) -> tuple:
        plans = self._enemy_script()
        damage_to_enemies = [0] * len(self._enemies)
        damage_to_allies = [0] * len(self._allies)
        attackers: List[_Unit] = []
        for unit, action in zip(self._allies, actions):
            if unit.alive and action >= ATTACK_OFFSET:
                damage_to_enemies[action - ATTACK_OFFSET] += unit.damage
                attackers.append(unit)
        for enemy, (kind, target) in zip(self._enemies, plans):
            if kind == "attack":
                damage_to_allies[target] += enemy.damage
                attackers.append(enemy)

        reward = 0.0
        for enemy, dmg in zip(self._enemies, damage_to_enemies):
            if dmg and enemy.alive:
                effective = min(dmg, enemy.hp)
                enemy.hp -= effective
                reward += effective
                self._damage_dealt += effective
                if not enemy.alive:
                    reward += KILL_BONUS
                    self._kills += 1
        for ally, dmg in zip(self._allies, damage_to_allies):
            ally.hp = max(ally.hp - dmg, 0)

        for unit in self._allies + self._enemies:
            unit.cooldown = max(unit.cooldown - 1, 0)
        for unit in attackers:
            unit.cooldown = self._cfg.cooldown

        occupied = self._occupied()
        for unit, action in zip(self._allies, actions):
            if unit.alive and 2 <= action < ATTACK_OFFSET:
                dx, dy = MOVES[action - 2]
                cell = (unit.x + dx, unit.y + dy)
                if self._free(cell, occupied):
                    occupied.discard(unit.pos)
                    unit.x, unit.y = cell
                    occupied.add(cell)
        for enemy, (kind, target) in zip(self._enemies, plans):
            if enemy.alive and kind == "approach" and self._allies[target].alive:
                self._approach(enemy, self._allies[target], occupied)

        won = not any(enemy.alive for enemy in self._enemies)
        lost = not any(ally.alive for ally in self._allies)
        if won:
            reward += WIN_BONUS
        return reward / self._max_return, won or lost, won
