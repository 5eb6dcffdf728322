use std::collections::HashMap;
use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};

use super::{
    is_token, IngestError, InvestorRecord, KeiretsuGroup, KeiretsuMembership, MacroArea,
    MacroAreaMap, MembershipBasis, Memberships, Ownership, RowError, SubsidiaryRecord,
};

const SUBSIDIARY_COLUMNS: [&str; 9] = [
    "subsidiary_id",
    "name",
    "country",
    "sector_code",
    "paidup_capital",
    "num_employees",
    "year_established",
    "owners",
    "local_share",
];

/// Column positions resolved from a header row.
struct Columns(Vec<usize>);

impl Columns {
    fn resolve(headers: &StringRecord, names: &[&str]) -> Result<Self, IngestError> {
        names
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h.trim() == *name)
                    .ok_or_else(|| IngestError::MissingColumn((*name).to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Columns)
    }

    fn get<'r>(&self, row: &'r StringRecord, i: usize) -> &'r str {
        row.get(self.0[i]).unwrap_or("")
    }
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    ReaderBuilder::new()
        .has_headers(true)
        .trim(Trim::All)
        .flexible(true)
        .from_reader(source)
}

fn line_of(row: &StringRecord, fallback: u64) -> u64 {
    row.position().map(|p| p.line()).unwrap_or(fallback)
}

fn parse_owners(raw: &str) -> Result<Vec<Ownership>, String> {
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    raw.split(';')
        .map(|pair| {
            let (id, share) = pair
                .split_once(':')
                .ok_or_else(|| format!("owner entry `{pair}` is not id:share"))?;
            let id = id.trim();
            if !is_token(id) {
                return Err(format!("invalid investor id `{id}`"));
            }
            let share: f64 = share
                .trim()
                .parse()
                .map_err(|_| format!("share `{}` is not a number", share.trim()))?;
            Ok(Ownership {
                investor_id: id.to_string(),
                share,
            })
        })
        .collect()
}

fn parse_optional<T: std::str::FromStr>(raw: &str) -> Result<Option<T>, String> {
    if raw.is_empty() {
        Ok(None)
    } else {
        raw.parse()
            .map(Some)
            .map_err(|_| format!("`{raw}` is not a valid value"))
    }
}

fn subsidiary_from_row(
    cols: &Columns,
    row: &StringRecord,
) -> Result<SubsidiaryRecord, (&'static str, String)> {
    let field = |i: usize| cols.get(row, i);
    let id = field(0).to_string();
    if !is_token(&id) {
        return Err(("subsidiary_id", format!("invalid id `{id}`")));
    }
    let sector_code = field(3)
        .parse::<u32>()
        .map_err(|_| ("sector_code", format!("`{}` is not an integer", field(3))))?;
    let paidup_capital = parse_optional::<f64>(field(4)).map_err(|m| ("paidup_capital", m))?;
    let num_employees = parse_optional::<u64>(field(5)).map_err(|m| ("num_employees", m))?;
    let year_established = parse_optional::<u16>(field(6)).map_err(|m| ("year_established", m))?;
    if let Some(y) = year_established {
        if !(1000..=9999).contains(&y) {
            return Err(("year_established", format!("`{y}` is not a 4-digit year")));
        }
    }
    let owners = parse_owners(field(7)).map_err(|m| ("owners", m))?;
    let local_share = if field(8).is_empty() {
        0.0
    } else {
        field(8)
            .parse::<f64>()
            .map_err(|_| ("local_share", format!("`{}` is not a number", field(8))))?
    };
    let record = SubsidiaryRecord {
        subsidiary_id: id,
        name: field(1).to_string(),
        country: field(2).to_string(),
        sector_code,
        paidup_capital,
        num_employees,
        year_established,
        owners,
        local_share,
    };
    record.validate()?;
    Ok(record)
}

/// Parses `subsidiaries.csv`. Every bad row is reported; nothing is dropped
/// silently.
pub fn parse_subsidiaries<R: Read>(source: R) -> Result<Vec<SubsidiaryRecord>, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::resolve(rdr.headers()?, &SUBSIDIARY_COLUMNS)?;
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut first_line: HashMap<String, u64> = HashMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = line_of(&row, i as u64 + 2);
        match subsidiary_from_row(&cols, &row) {
            Ok(rec) => {
                if let Some(prev) = first_line.get(&rec.subsidiary_id) {
                    errors.push(RowError {
                        line,
                        field: "subsidiary_id".into(),
                        message: format!(
                            "duplicate subsidiary_id `{}` (lines {prev} and {line})",
                            rec.subsidiary_id
                        ),
                    });
                } else {
                    first_line.insert(rec.subsidiary_id.clone(), line);
                    records.push(rec);
                }
            }
            Err((field, message)) => errors.push(RowError {
                line,
                field: field.into(),
                message,
            }),
        }
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(IngestError::InvalidRows(errors))
    }
}

/// Writes records in the column layout [`parse_subsidiaries`] reads.
pub fn write_subsidiaries<W: Write>(
    records: &[SubsidiaryRecord],
    sink: W,
) -> Result<(), IngestError> {
    let mut w = WriterBuilder::new().from_writer(sink);
    w.write_record(SUBSIDIARY_COLUMNS)?;
    for r in records {
        let owners: Vec<String> = r
            .owners
            .iter()
            .map(|o| format!("{}:{}", o.investor_id, o.share))
            .collect();
        w.write_record([
            r.subsidiary_id.clone(),
            r.name.clone(),
            r.country.clone(),
            r.sector_code.to_string(),
            r.paidup_capital.map(|k| k.to_string()).unwrap_or_default(),
            r.num_employees.map(|n| n.to_string()).unwrap_or_default(),
            r.year_established
                .map(|y| y.to_string())
                .unwrap_or_default(),
            owners.join(";"),
            r.local_share.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `memberships.csv` (`investor_id,group,basis`).
pub fn parse_memberships<R: Read>(source: R) -> Result<Memberships, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::resolve(rdr.headers()?, &["investor_id", "group", "basis"])?;
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut seen: HashMap<(String, KeiretsuGroup), u64> = HashMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = line_of(&row, i as u64 + 2);
        let mut fail = |field: &str, message: String| {
            errors.push(RowError {
                line,
                field: field.into(),
                message,
            })
        };
        let id = cols.get(&row, 0);
        if !is_token(id) {
            fail("investor_id", format!("invalid id `{id}`"));
            continue;
        }
        let group = match cols.get(&row, 1).parse::<KeiretsuGroup>() {
            Ok(g) => g,
            Err(m) => {
                fail("group", m);
                continue;
            }
        };
        let basis = match cols.get(&row, 2).parse::<MembershipBasis>() {
            Ok(b) => b,
            Err(m) => {
                fail("basis", m);
                continue;
            }
        };
        if let Some(prev) = seen.insert((id.to_string(), group), line) {
            fail(
                "group",
                format!("duplicate membership ({id}, {group}) (lines {prev} and {line})"),
            );
            continue;
        }
        entries.push(KeiretsuMembership {
            investor_id: id.to_string(),
            group,
            basis,
        });
    }
    if !errors.is_empty() {
        return Err(IngestError::InvalidRows(errors));
    }
    Ok(Memberships::new(entries).expect("duplicates rejected above"))
}

pub fn write_memberships<W: Write>(m: &Memberships, sink: W) -> Result<(), IngestError> {
    let mut w = WriterBuilder::new().from_writer(sink);
    w.write_record(["investor_id", "group", "basis"])?;
    for e in m.entries() {
        w.write_record([e.investor_id.as_str(), e.group.name(), e.basis.name()])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses an optional `investor_id,name` table.
pub fn parse_investors<R: Read>(source: R) -> Result<Vec<InvestorRecord>, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::resolve(rdr.headers()?, &["investor_id", "name"])?;
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = line_of(&row, i as u64 + 2);
        let id = cols.get(&row, 0);
        if !is_token(id) {
            errors.push(RowError {
                line,
                field: "investor_id".into(),
                message: format!("invalid id `{id}`"),
            });
        } else if let Some(prev) = seen.insert(id.to_string(), line) {
            errors.push(RowError {
                line,
                field: "investor_id".into(),
                message: format!("duplicate investor_id `{id}` (lines {prev} and {line})"),
            });
        } else {
            out.push(InvestorRecord {
                investor_id: id.to_string(),
                name: cols.get(&row, 1).to_string(),
            });
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(IngestError::InvalidRows(errors))
    }
}

/// Parses `macroareas.csv` (`country,macroarea`).
pub fn parse_macroareas<R: Read>(source: R) -> Result<MacroAreaMap, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::resolve(rdr.headers()?, &["country", "macroarea"])?;
    let mut map = MacroAreaMap::default();
    let mut errors = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = line_of(&row, i as u64 + 2);
        let country = cols.get(&row, 0);
        if country.is_empty() {
            errors.push(RowError {
                line,
                field: "country".into(),
                message: "empty country".into(),
            });
            continue;
        }
        match cols.get(&row, 1).parse::<MacroArea>() {
            Ok(area) => map.insert(country, area),
            Err(message) => errors.push(RowError {
                line,
                field: "macroarea".into(),
                message,
            }),
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(IngestError::InvalidRows(errors))
    }
}

pub fn write_macroareas<W: Write>(map: &MacroAreaMap, sink: W) -> Result<(), IngestError> {
    let mut w = WriterBuilder::new().from_writer(sink);
    w.write_record(["country", "macroarea"])?;
    for (country, area) in map.iter() {
        w.write_record([country, area.name()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "subsidiary_id,name,country,sector_code,paidup_capital,num_employees,year_established,owners,local_share\n";

    fn parse(body: &str) -> Result<Vec<SubsidiaryRecord>, IngestError> {
        parse_subsidiaries(format!("{HEADER}{body}").as_bytes())
    }

    fn row_errors(err: IngestError) -> Vec<RowError> {
        match err {
            IngestError::InvalidRows(rows) => rows,
            other => panic!("expected row errors, got {other}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn single_row_two_owners() {
        let recs = parse("S1,Alpha Co,Thailand,1100,1000,250,1990,A:0.6;B:0.4,0.0\n").unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.owners.len(), 2);
        assert_eq!(r.owners[0].investor_id, "A");
        assert_eq!(r.owners[0].share, 0.6);
        assert_eq!(r.owners[1].share, 0.4);
        assert_eq!(r.paidup_capital, Some(1000.0));
        assert_eq!(r.year_established, Some(1990));
    }

    #[test]
    fn share_out_of_range_is_reported_at_its_row() {
        let errs = row_errors(
            parse(
                "S1,Alpha,Thailand,1100,1000,,1990,A:1.0,0\n\
                 S2,Beta,Thailand,1100,1000,,1990,A:1.2,0\n",
            )
            .unwrap_err(),
        );
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        assert_eq!(errs[0].field, "owners");
        assert!(errs[0].message.contains("share out of range"));
    }

    #[test]
    fn duplicate_id_names_both_rows() {
        let errs = row_errors(
            parse(
                "S1,Alpha,Thailand,1100,1000,,1990,A:0.5,0\n\
                 S1,Beta,Thailand,1100,1000,,1990,B:0.5,0\n",
            )
            .unwrap_err(),
        );
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("lines 2 and 3"), "{}", errs[0]);
    }

    #[test]
    fn malformed_fields_collected() {
        let errs = row_errors(
            parse(
                "S1,Alpha,Thailand,abc,1000,,1990,A:0.5,0\n\
                 S2,Beta,Thailand,1100,1000,,1990,A0.5,0\n\
                 S3,Gamma,Thailand,1150,1000,,1990,A:0.5,0\n\
                 S4,Delta,Thailand,1100,1000,,1990,A:0.6;B:0.5,0\n\
                 S5,Eps,Thailand,1100,1000,,1990,A:0.3;A:0.3,0\n",
            )
            .unwrap_err(),
        );
        let fields: Vec<_> = errs.iter().map(|e| (e.line, e.field.as_str())).collect();
        assert_eq!(
            fields,
            vec![
                (2, "sector_code"),
                (3, "owners"),
                (4, "sector_code"),
                (5, "owners"),
                (6, "owners")
            ]
        );
    }

    #[test]
    fn missing_column() {
        let err = parse_subsidiaries("subsidiary_id,name\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn(c) if c == "country"));
    }

    #[test]
    fn optional_fields_may_be_blank() {
        let recs = parse("S1,Alpha,Brazil,0,,,,X:1,\n").unwrap();
        assert_eq!(recs[0].paidup_capital, None);
        assert_eq!(recs[0].num_employees, None);
        assert_eq!(recs[0].year_established, None);
        assert_eq!(recs[0].local_share, 0.0);
    }

    #[test]
    fn memberships_parse() {
        let m = parse_memberships(
            "investor_id,group,basis\nI001,Mitsui,PresidentsClub\nI001,Sumitomo,Both\nI003,fuyo,Top50Equity\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.is_dual_affiliated("I001"));
        assert_eq!(m.groups_of("I003"), &[KeiretsuGroup::Fuyo]);
    }

    #[test]
    fn unknown_group_rejected() {
        let errs = row_errors(
            parse_memberships("investor_id,group,basis\nI002,Toyota,Both\n".as_bytes())
                .unwrap_err(),
        );
        assert!(errs[0].message.contains("unknown group"));
        assert!(errs[0].message.contains("Mitsubishi"));
    }

    #[test]
    fn duplicate_membership_rejected() {
        let errs = row_errors(
            parse_memberships(
                "investor_id,group,basis\nI1,Sanwa,Both\nI1,Sanwa,Top50Equity\n".as_bytes(),
            )
            .unwrap_err(),
        );
        assert_eq!(errs[0].line, 3);
    }

    #[test]
    fn investors_unique() {
        let err = parse_investors("investor_id,name\nA,One\nA,Two\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::InvalidRows(_)));
        let ok = parse_investors("investor_id,name\nA,One\nB,\"Two, Inc\"\n".as_bytes()).unwrap();
        assert_eq!(ok[1].name, "Two, Inc");
    }

    #[test]
    fn macroarea_table_round_trips() {
        let map = MacroAreaMap::seeded();
        let mut buf = Vec::new();
        write_macroareas(&map, &mut buf).unwrap();
        assert_eq!(parse_macroareas(buf.as_slice()).unwrap(), map);
    }
}
