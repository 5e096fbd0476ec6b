//! Test-data dictionary: value pools per stereotype and a seeded picker.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::models::Stereotype;

const EMAILS: &[&str] = &[
    "ana.garcia@example.org",
    "luis.martin@example.com",
    "marta.lopez@example.net",
    "jorge.sanz@mail.example.org",
    "elena.ruiz@example.es",
    "pablo.diaz@example.org",
    "lucia.moreno@example.com",
    "diego.munoz@example.net",
    "sara.alonso@example.org",
    "ivan.romero@example.com",
    "carmen.navarro@example.es",
    "raul.torres@example.org",
    "irene.gil@example.net",
    "alberto.vazquez@example.com",
    "nuria.serrano@example.org",
    "oscar.blanco@example.es",
    "paula.molina@example.com",
    "hugo.castro@example.net",
    "alba.ortega@example.org",
    "mario.delgado@example.com",
    "info+test@example.org",
    "j_smith@example.co.uk",
];

const DATES: &[&str] = &[
    "2009-01-15",
    "2009-02-28",
    "2008-02-29",
    "2010-03-31",
    "2011-04-30",
    "2012-05-01",
    "2007-06-18",
    "2009-07-04",
    "2010-08-23",
    "2011-09-09",
    "2012-10-12",
    "2008-11-30",
    "2009-12-31",
    "2000-01-01",
    "1999-12-31",
    "2004-02-29",
    "2013-06-30",
    "2006-10-05",
    "2005-03-17",
    "2010-01-02",
    "1987-08-14",
];

const NAMES: &[&str] = &[
    "Ana", "Luis", "Marta", "Jorge", "Elena", "Pablo", "Lucia", "Diego", "Sara", "Ivan", "Carmen", "Raul", "Irene",
    "Alberto", "Nuria", "Oscar", "Paula", "Hugo", "Alba", "Mario", "Teresa",
];

const SURNAMES: &[&str] = &[
    "Garcia", "Martin", "Lopez", "Sanz", "Ruiz", "Diaz", "Moreno", "Munoz", "Alonso", "Romero", "Navarro", "Torres",
    "Gil", "Vazquez", "Serrano", "Blanco", "Molina", "Castro", "Ortega", "Delgado", "Rubio",
];

const ADDRESSES: &[&str] = &[
    "Calle Mayor 1",
    "Avenida de la Constitucion 12",
    "Plaza de Espana 3",
    "Calle Real 45",
    "Paseo de la Castellana 100",
    "Calle Sierpes 7",
    "Gran Via 28",
    "Calle Larios 5",
    "Rambla de Catalunya 60",
    "Calle San Fernando 4",
    "Avenida Diagonal 210",
    "Calle Alcala 150",
    "Ronda de Triana 9",
    "Calle Colon 22",
    "Avenida del Puerto 31",
    "Calle Feria 16",
    "Plaza Nueva 2",
    "Calle Tetuan 11",
    "Camino Viejo 8",
    "Calle Betis 40",
    "Avenida Andalucia 77",
];

const STRINGS: &[&str] = &[
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliett", "kilo", "lima", "mike",
    "november", "oscar", "papa", "quebec", "romeo", "sierra", "tango", "test value", "A-1_b.2",
];

const INTEGERS: &[&str] = &[
    "0", "1", "-1", "7", "42", "100", "-250", "999", "1000", "-1000", "12345", "-54321", "65535", "99999", "-99999",
    "250000", "-500000", "1000000", "-1000000", "314159", "2009",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataDictionary {
    pub pools: BTreeMap<Stereotype, Vec<String>>,
    pub seed: u64,
}

/// Bundled pools with at least twenty entries per stereotype.
pub fn dictionary_default(seed: u64) -> DataDictionary {
    let pool = |s: &[&str]| s.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    let pools = Stereotype::ALL
        .iter()
        .map(|&st| {
            let values = match st {
                Stereotype::Email => pool(EMAILS),
                Stereotype::Date => pool(DATES),
                Stereotype::Name => pool(NAMES),
                Stereotype::Surname => pool(SURNAMES),
                Stereotype::Address => pool(ADDRESSES),
                Stereotype::String => pool(STRINGS),
                Stereotype::Integer => pool(INTEGERS),
            };
            (st, values)
        })
        .collect();
    DataDictionary { pools, seed }
}

impl DataDictionary {
    /// A fresh picker; the same seed always yields the same sequence.
    pub fn picker(&self) -> Picker<'_> {
        Picker { dict: self, rng: ChaCha8Rng::seed_from_u64(self.seed) }
    }

    pub fn missing_pools(&self) -> Vec<Stereotype> {
        Stereotype::ALL.iter().copied().filter(|s| self.pools.get(s).is_none_or(|p| p.is_empty())).collect()
    }
}

/// Seeded random pointer into the dictionary's pools.
pub struct Picker<'a> {
    dict: &'a DataDictionary,
    rng: ChaCha8Rng,
}

impl Picker<'_> {
    pub fn pick(&mut self, stereotype: Stereotype) -> String {
        let pool = &self.dict.pools[&stereotype];
        pool[self.rng.random_range(0..pool.len())].clone()
    }
}
