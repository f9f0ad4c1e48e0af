/// Counter for fresh propositional variable indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreshState {
    next: u32,
}

impl Default for FreshState {
    fn default() -> Self {
        FreshState { next: 1 }
    }
}

impl FreshState {
    pub fn new() -> FreshState {
        FreshState::default()
    }

    pub fn starting_at(next: u32) -> FreshState {
        FreshState { next: next.max(1) }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }

    pub fn fresh(&mut self) -> u32 {
        let i = self.next;
        self.next += 1;
        i
    }

    /// Skips past an index already in use.
    pub fn reserve(&mut self, used: u32) {
        if used >= self.next {
            self.next = used + 1;
        }
    }
}
