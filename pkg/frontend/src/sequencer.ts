// Guards against out-of-order responses: only the newest issued request
// may be applied, and application is monotone in the sequence number.
export class ResponseSequencer {
  private issued = 0;
  private applied = 0;

  next(): number {
    return ++this.issued;
  }

  shouldApply(id: number): boolean {
    if (id !== this.issued || id <= this.applied) {
      return false;
    }
    this.applied = id;
    return true;
  }

  get inFlight(): boolean {
    return this.issued > this.applied;
  }
}
