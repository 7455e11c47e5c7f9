//! Level-indexed tables: a finite list of levels plus a periodic tail.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(Default)]
pub enum Tail {
    /// Every level past the list uses the last entry.
    #[default]
    RepeatLast,
    /// Past the list, the last `p` entries repeat in order.
    Cycle(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LevelError {
    #[error("level table is empty")]
    Empty,
    #[error("cycle period {period} is invalid for a table of {len} levels")]
    BadPeriod { period: usize, len: usize },
}

/// Values for every level `y >= 0`, described finitely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable<T>")]
pub struct LevelTable<T> {
    levels: Vec<T>,
    #[serde(default)]
    tail: Tail,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTable<T> {
    Full {
        levels: Vec<T>,
        #[serde(default)]
        tail: Tail,
    },
    Constant {
        constant: T,
    },
}

impl<T> TryFrom<RawTable<T>> for LevelTable<T> {
    type Error = LevelError;
    fn try_from(raw: RawTable<T>) -> Result<Self, LevelError> {
        match raw {
            RawTable::Full { levels, tail } => LevelTable::new(levels, tail),
            RawTable::Constant { constant } => Ok(LevelTable::constant(constant)),
        }
    }
}

impl<T> LevelTable<T> {
    pub fn new(levels: Vec<T>, tail: Tail) -> Result<Self, LevelError> {
        if levels.is_empty() {
            return Err(LevelError::Empty);
        }
        if let Tail::Cycle(p) = tail {
            if p == 0 || p > levels.len() {
                return Err(LevelError::BadPeriod {
                    period: p,
                    len: levels.len(),
                });
            }
        }
        Ok(LevelTable { levels, tail })
    }

    pub fn constant(value: T) -> Self {
        LevelTable {
            levels: vec![value],
            tail: Tail::RepeatLast,
        }
    }

    /// Alternates through `values` forever, starting at level 0.
    pub fn cycle(values: Vec<T>) -> Result<Self, LevelError> {
        let p = values.len();
        Self::new(values, Tail::Cycle(p))
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn period(&self) -> usize {
        match self.tail {
            Tail::RepeatLast => 1,
            Tail::Cycle(p) => p,
        }
    }

    /// Number of levels before the periodic part starts.
    pub fn preperiod(&self) -> usize {
        self.levels.len() - self.period()
    }

    fn index(&self, y: usize) -> usize {
        let len = self.levels.len();
        if y < len {
            return y;
        }
        let p = self.period();
        len - p + (y - (len - p)) % p
    }

    pub fn get(&self, y: usize) -> &T {
        &self.levels[self.index(y)]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> LevelTable<U> {
        LevelTable {
            levels: self.levels.iter().map(f).collect(),
            tail: self.tail,
        }
    }

    pub fn try_map<U, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<LevelTable<U>, E> {
        Ok(LevelTable {
            levels: self.levels.iter().map(f).collect::<Result<_, E>>()?,
            tail: self.tail,
        })
    }
}

/// Shape of an eventually periodic level function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub preperiod: usize,
    pub period: usize,
}

impl Shape {
    pub fn of<T>(t: &LevelTable<T>) -> Shape {
        Shape {
            preperiod: t.preperiod(),
            period: t.period(),
        }
    }

    /// Shape valid for any function of both inputs.
    pub fn join(self, other: Shape) -> Shape {
        Shape {
            preperiod: self.preperiod.max(other.preperiod),
            period: self.period.lcm(&other.period),
        }
    }

    /// Levels to check so every level class is visited at least twice.
    pub fn horizon(self) -> usize {
        self.preperiod + 2 * self.period
    }

    /// Tabulates `f` over enough levels to describe it exactly.
    pub fn tabulate<T, E>(
        self,
        mut f: impl FnMut(usize) -> Result<T, E>,
    ) -> Result<LevelTable<T>, E> {
        let len = self.preperiod + self.period;
        let levels = (0..len).map(&mut f).collect::<Result<Vec<T>, E>>()?;
        Ok(LevelTable {
            levels,
            tail: Tail::Cycle(self.period),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeat_last_and_cycle() {
        let t = LevelTable::new(vec![1, 2, 3], Tail::RepeatLast).unwrap();
        assert_eq!(
            (0..6).map(|y| *t.get(y)).collect::<Vec<_>>(),
            vec![1, 2, 3, 3, 3, 3]
        );
        let c = LevelTable::new(vec![1, 2, 3], Tail::Cycle(2)).unwrap();
        assert_eq!(
            (0..7).map(|y| *c.get(y)).collect::<Vec<_>>(),
            vec![1, 2, 3, 2, 3, 2, 3]
        );
        assert!(LevelTable::new(vec![1], Tail::Cycle(2)).is_err());
        assert!(LevelTable::<i32>::new(vec![], Tail::RepeatLast).is_err());
    }

    #[test]
    fn tabulate_matches_function() {
        let a = LevelTable::new(vec![5, 1, 2], Tail::Cycle(2)).unwrap();
        let b = LevelTable::cycle(vec![10, 20, 30]).unwrap();
        let shape = Shape::of(&a).join(Shape::of(&b));
        let sum = shape
            .tabulate::<_, ()>(|y| Ok(a.get(y) + b.get(y) + a.get(y + 1)))
            .unwrap();
        for y in 0..40 {
            assert_eq!(*sum.get(y), a.get(y) + b.get(y) + a.get(y + 1));
        }
    }

    #[test]
    fn serde_forms() {
        let t: LevelTable<i32> =
            serde_json::from_str(r#"{"levels":[1,2],"tail":{"cycle":2}}"#).unwrap();
        assert_eq!(*t.get(3), 2);
        let c: LevelTable<i32> = serde_json::from_str(r#"{"constant":7}"#).unwrap();
        assert_eq!(*c.get(100), 7);
        assert!(serde_json::from_str::<LevelTable<i32>>(r#"{"levels":[]}"#).is_err());
    }
}
