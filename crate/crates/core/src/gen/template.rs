use crate::error::{Error, Result};
use crate::scene::{InstanceSpec, StructuredScene};

pub const PROMPT_PREFIX: &str = "A photo-realistic image of";

const NUMBER_WORDS: [&str; 10] = [
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
];
const ORDINAL_WORDS: [&str; 10] = [
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
];

pub fn number_word(n: usize) -> Option<&'static str> {
    n.checked_sub(1).and_then(|i| NUMBER_WORDS.get(i).copied())
}

pub fn ordinal_word(ordinal: u32) -> Option<&'static str> {
    (ordinal as usize)
        .checked_sub(1)
        .and_then(|i| ORDINAL_WORDS.get(i).copied())
}

fn ordinal(ordinal: u32) -> Result<&'static str> {
    ordinal_word(ordinal).ok_or_else(|| Error::InvalidScene(format!("no ordinal word for {ordinal}")))
}

/// Sentence describing one instance: color clause then its relation clauses.
fn instance_sentence(scene: &StructuredScene, inst: &InstanceSpec) -> Result<Option<String>> {
    let mut clauses = Vec::new();
    if let Some(color) = inst.color {
        clauses.push(color.as_str().to_string());
    }
    for rel in scene.relations().iter().filter(|r| r.subject == inst.key()) {
        if scene.index_of(&rel.object).is_none() {
            return Err(Error::InvalidScene(format!("unresolved reference {}", rel.object)));
        }
        clauses.push(format!(
            "{} the {} {}",
            rel.kind.phrase(),
            ordinal(rel.object.ordinal)?,
            rel.object.category
        ));
    }
    if clauses.is_empty() {
        return Ok(None);
    }
    Ok(Some(format!(
        "The {} {} is {}.",
        ordinal(inst.ordinal)?,
        inst.category,
        clauses.join(", ")
    )))
}

/// Render the scene's prompt.
///
/// `A photo-realistic image of three bench, one boat. The first bench is
/// white, on the left of the first boat. ...` Counts are number words,
/// categories are neither capitalized nor pluralized, and instance sentences
/// follow the canonical instance order.
pub fn fill_template(scene: &StructuredScene) -> Result<String> {
    if scene.total_number() == 0 {
        return Err(Error::InvalidScene("scene has no instances".into()));
    }
    for rel in scene.relations() {
        if scene.index_of(&rel.subject).is_none() {
            return Err(Error::InvalidScene(format!("unresolved reference {}", rel.subject)));
        }
    }
    let counts = scene
        .category_counts()
        .into_iter()
        .map(|(category, n)| {
            number_word(n)
                .map(|w| format!("{w} {category}"))
                .ok_or_else(|| Error::InvalidScene(format!("no number word for {n}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut prompt = format!("{PROMPT_PREFIX} {}.", counts.join(", "));
    for inst in scene.instances() {
        if let Some(sentence) = instance_sentence(scene, inst)? {
            prompt.push(' ');
            prompt.push_str(&sentence);
        }
    }
    Ok(prompt)
}

pub fn word_count(prompt: &str) -> usize {
    prompt.split_whitespace().count()
}
